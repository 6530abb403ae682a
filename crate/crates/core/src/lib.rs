//! A checker for Automath books.
//!
//! Books are parsed ([`syntax`]), elaborated into a calculus of constructions
//! with definitions and checked line by line ([`book`], [`kernel`]).
//! [`clean`] removes dead-end assumptions and [`translate`] converts between
//! books and flat definition environments.

pub mod book;
pub mod clean;
pub mod cli;
pub mod kernel;
pub mod syntax;
pub mod term;
pub mod translate;
