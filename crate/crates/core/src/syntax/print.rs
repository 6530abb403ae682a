use std::collections::BTreeSet;

use super::{is_sort_keyword, WILDCARD};
use crate::book::{Book, Content, Line};
use crate::term::{Name, Sort, Term};

/// Output notation for terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Notation {
    /// `[x,A]B`, `<a>f`, `PROP`, `TYPE`.
    Original,
    /// `\ x : A . M`, `! x : A . B`, `A -> B`, `f a`, `Prop`, `Type`.
    Modern,
    /// Typing-judgement style: `λx : A . M`, `Πx : A . B`, `A → B`.
    Judgement,
}

pub fn print_term(t: &Term, notation: Notation) -> String {
    let mut p = Printer { notation, names: Vec::new(), out: String::new() };
    p.term(t, 0);
    p.out
}

/// One book line; the separator before the category is `;` in the original
/// notation and `:` otherwise.
pub fn print_line(line: &Line, notation: Notation) -> String {
    let mut s = String::new();
    if let Some(ind) = &line.indicator {
        s.push_str(ind);
        s.push(' ');
    }
    s.push_str("* ");
    s.push_str(&line.identifier);
    s.push_str(" := ");
    match &line.content {
        Content::Dash => s.push_str("---"),
        Content::Primitive => s.push_str("PN"),
        Content::Def(m) => s.push_str(&print_term(m, notation)),
    }
    s.push_str(if notation == Notation::Original { " ; " } else { " : " });
    s.push_str(&print_term(&line.category, notation));
    s
}

pub fn print_book(book: &Book, notation: Notation) -> String {
    book.lines().iter().map(|l| print_line(l, notation) + "\n").collect()
}

struct Printer {
    notation: Notation,
    /// Names chosen for the enclosing binders, innermost last.
    names: Vec<String>,
    out: String,
}

// precedence levels
const BINDER: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

fn level(t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::Pi(..) => BINDER,
        Term::App(..) => APP,
        _ => ATOM,
    }
}

impl Printer {
    fn term(&mut self, t: &Term, ctx: u8) {
        match self.notation {
            Notation::Original => self.original(t),
            Notation::Modern | Notation::Judgement => {
                let paren = level(t) < ctx;
                if paren {
                    self.out.push('(');
                }
                self.modern(t);
                if paren {
                    self.out.push(')');
                }
            }
        }
    }

    fn sort(&mut self, s: Sort) {
        let word = match (self.notation, s) {
            (Notation::Original, Sort::Star) => "PROP",
            (Notation::Original, Sort::Box) => "TYPE",
            (_, Sort::Star) => "Prop",
            (_, Sort::Box) => "Type",
        };
        self.out.push_str(word);
    }

    /// Kernel-generated names `x#n` are shown as their hint `x`.
    fn var(&mut self, x: &Name) {
        self.out.push_str(x.split('#').next().unwrap_or(x));
    }

    fn bound(&mut self, i: usize) {
        match self.names.len().checked_sub(i + 1) {
            Some(k) => {
                let n = self.names[k].clone();
                self.out.push_str(&n);
            }
            None => self.out.push_str(&format!("#{i}")),
        }
    }

    fn constant(&mut self, c: &Name, args: &[Term]) {
        self.out.push_str(c);
        if args.is_empty() {
            return;
        }
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push(',');
            }
            self.term(a, BINDER);
        }
        self.out.push(')');
    }

    /// A printable name for a binder with hint `hint` over `body` that
    /// neither captures nor is captured.
    fn binder_name(&self, hint: &Name, body: &Term) -> String {
        let base = hint.split('#').next().unwrap_or("x");
        let mut name = if base.is_empty() || base == WILDCARD || is_sort_keyword(base) || base == "PN" {
            "x".to_string()
        } else {
            base.to_string()
        };
        let mut avoid: BTreeSet<String> = body.free_vars().iter().map(|n| n.to_string()).collect();
        avoid.extend(body.constants().iter().map(|n| n.to_string()));
        let shadowed = |n: &str| self.names.iter().any(|m| m == n);
        while avoid.contains(&name) || shadowed(&name) {
            name.push('\'');
        }
        name
    }

    fn with_binder(&mut self, name: String, body: &Term, ctx: u8) {
        self.names.push(name);
        self.term(body, ctx);
        self.names.pop();
    }

    fn original(&mut self, t: &Term) {
        match t {
            Term::Sort(s) => self.sort(*s),
            Term::Var(x) => self.var(x),
            Term::Bound(i) => self.bound(*i),
            Term::Const(c, args) => self.constant(c, args),
            Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
                let name = if &**x == WILDCARD && !b.uses_bound(0) {
                    WILDCARD.to_string()
                } else {
                    self.binder_name(x, b)
                };
                self.out.push('[');
                self.out.push_str(&name);
                self.out.push(',');
                self.original(a);
                self.out.push(']');
                self.with_binder(name, b, 0);
            }
            Term::App(f, a) => {
                self.out.push('<');
                self.original(a);
                self.out.push('>');
                self.original(f);
            }
        }
    }

    fn modern(&mut self, t: &Term) {
        let judgement = self.notation == Notation::Judgement;
        match t {
            Term::Sort(s) => self.sort(*s),
            Term::Var(x) => self.var(x),
            Term::Bound(i) => self.bound(*i),
            Term::Const(c, args) => self.constant(c, args),
            Term::Pi(x, a, b) if &**x == WILDCARD && !b.uses_bound(0) => {
                self.term(a, APP);
                self.out.push_str(if judgement { " → " } else { " -> " });
                self.with_binder(WILDCARD.to_string(), b, BINDER);
            }
            Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
                let name = self.binder_name(x, b);
                let sym = match (t, judgement) {
                    (Term::Lam(..), true) => "λ",
                    (Term::Lam(..), false) => "\\ ",
                    (_, true) => "Π",
                    (_, false) => "! ",
                };
                self.out.push_str(sym);
                self.out.push_str(&name);
                self.out.push_str(" : ");
                self.term(a, BINDER);
                self.out.push_str(" . ");
                self.with_binder(name, b, BINDER);
            }
            Term::App(f, a) => {
                self.term(f, APP);
                self.out.push(' ');
                self.term(a, ATOM);
            }
        }
    }
}
