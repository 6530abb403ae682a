//! Books to environments and back, plus the `.denv` text format.
//!
//! A `.denv` file holds one entry per line:
//!
//! ```text
//! A : Prop, B : Prop |> IMP(A,B) := ! x : A . B : Prop
//! |> CON() := PN : Prop
//! ```
//!
//! Terms use the modern dialect. Blank lines and `#` comments are skipped.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::book::{Book, BookError, Content, Line, LineKind};
use crate::clean::is_clean;
use crate::kernel::{DefEntry, Definiens, Env, Kernel, KernelConfig, KernelError};
use crate::syntax::{
    lex_line, print_term, Dialect, ElabError, Elaborator, Expected, Notation, ParseError, Parser, SourceLoc, Tok,
};
use crate::term::{Name, Telescope, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("the book is not ok")]
    BookNotOk,
    #[error("the book is not clean")]
    NotClean,
    #[error("environment entry `{entry}` is not legal: {message}")]
    IllegalEnv { entry: String, message: String },
    #[error("clause {clause} fails: {detail}")]
    ClauseFailed { clause: u8, detail: String },
}

/// Per environment entry, the new name of each parameter.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RenamingMap {
    pub per_entry: Vec<HashMap<Name, Name>>,
}

pub fn env_of_book(b: &Book) -> Result<Env, TranslateError> {
    if !b.is_ok() {
        return Err(TranslateError::BookNotOk);
    }
    Ok(b.env().clone())
}

pub fn book_of_env(d: &Env) -> Result<Book, TranslateError> {
    book_of_env_with_renaming(d).map(|(b, _)| b)
}

/// Expands every entry `x̄:Ā ▷ c(x̄) := M/PN : N` into a chain of assumption
/// lines followed by one definition or primitive line. Parameters are renamed
/// so that every identifier in the output is distinct.
pub fn book_of_env_with_renaming(d: &Env) -> Result<(Book, RenamingMap), TranslateError> {
    let cfg = KernelConfig::default();
    d.check_legal(cfg).map_err(|(i, e)| TranslateError::IllegalEnv {
        entry: d.entries()[i].name.to_string(),
        message: e.to_string(),
    })?;
    let mut used: HashSet<Name> = d.iter().map(|e| e.name.clone()).collect();
    let mut lines = Vec::new();
    let mut renaming = RenamingMap::default();
    for entry in d.iter() {
        let mut map: HashMap<Name, Term> = HashMap::new();
        let mut names = HashMap::new();
        let mut prev: Option<Name> = None;
        for (x, ty) in entry.params.iter() {
            let fresh = fresh_variant(x, &used);
            used.insert(fresh.clone());
            lines.push(Line {
                indicator: prev.clone(),
                identifier: fresh.clone(),
                content: Content::Dash,
                category: ty.subst_many(&map),
                loc: SourceLoc { line: lines.len() + 1, col: 1 },
            });
            map.insert(x.clone(), Term::Var(fresh.clone()));
            names.insert(x.clone(), fresh.clone());
            prev = Some(fresh);
        }
        lines.push(Line {
            indicator: prev,
            identifier: entry.name.clone(),
            content: match &entry.body {
                Definiens::Term(m) => Content::Def(m.subst_many(&map)),
                Definiens::Primitive => Content::Primitive,
            },
            category: entry.ty.subst_many(&map),
            loc: SourceLoc { line: lines.len() + 1, col: 1 },
        });
        renaming.per_entry.push(names);
    }
    let book = Book::from_lines(lines, cfg).map_err(|e: BookError| TranslateError::IllegalEnv {
        entry: e.loc.line.to_string(),
        message: e.to_string(),
    })?;
    Ok((book, renaming))
}

/// `x`, else `x1`, `x2`, … whichever is first unused.
fn fresh_variant(x: &Name, used: &HashSet<Name>) -> Name {
    if !used.contains(x) {
        return x.clone();
    }
    (1..).map(|i| Name::from(format!("{x}{i}"))).find(|n| !used.contains(n)).expect("unbounded")
}

/// Checks the correspondence between an ok, clean book and its environment.
pub fn roundtrip_check(b: &Book) -> Result<(), TranslateError> {
    if !b.is_ok() {
        return Err(TranslateError::BookNotOk);
    }
    if !is_clean(b) {
        return Err(TranslateError::NotClean);
    }
    let fail = |clause: u8, detail: String| TranslateError::ClauseFailed { clause, detail };
    let env = env_of_book(b)?;

    env.check_legal(b.config())
        .map_err(|(i, e)| fail(1, format!("entry `{}`: {e}", env.entries()[i].name)))?;

    let defs: Vec<&Line> = b.lines().iter().filter(|l| l.kind() != LineKind::Assumption).collect();
    if defs.len() != env.len() {
        return Err(fail(2, format!("{} definition lines but {} entries", defs.len(), env.len())));
    }
    for (line, entry) in defs.iter().zip(env.iter()) {
        let same_body = match (&line.content, &entry.body) {
            (Content::Def(m), Definiens::Term(n)) => m == n,
            (Content::Primitive, Definiens::Primitive) => true,
            _ => false,
        };
        let same_params = b.typing_context(line.indicator.as_deref()) == entry.params;
        if line.identifier != entry.name || !same_body || line.category != entry.ty || !same_params {
            return Err(fail(2, format!("line `{}` does not match entry `{}`", line.identifier, entry.name)));
        }
    }

    for x in b.lines().iter().filter(|l| l.kind() == LineKind::Assumption) {
        let in_entries: BTreeSet<&Name> =
            env.iter().filter(|e| e.params.contains(&x.identifier)).map(|e| &e.name).collect();
        let dependent: BTreeSet<&Name> = defs
            .iter()
            .filter(|l| b.subject_list(l.indicator.as_deref()).contains(&x.identifier))
            .map(|l| &l.identifier)
            .collect();
        if in_entries != dependent || in_entries.is_empty() {
            return Err(fail(3, format!("assumption `{}` is not matched by the dependent entries", x.identifier)));
        }
    }

    let back = book_of_env(&env).map_err(|e| fail(4, e.to_string()))?;
    if !back.is_ok() || !is_clean(&back) {
        return Err(fail(4, "the translated-back book is not ok and clean".into()));
    }
    let again = env_of_book(&back)?;
    let same = again.len() == env.len()
        && env.iter().zip(again.iter()).all(|(a, b)| a.alpha_eq_up_to_renaming(b));
    if !same {
        return Err(fail(4, "the round trip changed the environment".into()));
    }
    Ok(())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DenvError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{loc}: error[{}]: {error}", error.class())]
    Elab { loc: SourceLoc, error: ElabError },
}

impl DenvError {
    pub fn class(&self) -> &'static str {
        match self {
            DenvError::Parse(_) => "ParseError",
            DenvError::Elab { error, .. } => error.class(),
        }
    }

    pub fn loc(&self) -> SourceLoc {
        match self {
            DenvError::Parse(e) => e.loc,
            DenvError::Elab { loc, .. } => *loc,
        }
    }
}

/// Reads a `.denv` text. Entries are elaborated but not type checked.
pub fn parse_denv(text: &str) -> Result<Env, DenvError> {
    let mut env = Env::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let entry = parse_entry(&env, raw, lineno)?;
        let loc = SourceLoc { line: lineno, col: 1 };
        env.push(entry).map_err(|e| DenvError::Elab { loc, error: e.into() })?;
    }
    Ok(env)
}

fn parse_entry(env: &Env, text: &str, lineno: usize) -> Result<DefEntry, DenvError> {
    let toks = lex_line(text, lineno)?;
    let mut p = Parser::new(&toks, lineno, Dialect::Modern);
    let mut k = Kernel::new(env, KernelConfig::default());
    let elab_err = |loc: SourceLoc| move |error: ElabError| DenvError::Elab { loc, error };

    let mut params = Telescope::new();
    if p.peek() != Some(&Tok::Triangle) {
        loop {
            let loc = p.loc();
            let x = p.ident("parameter name")?;
            p.expect(&Tok::Colon)?;
            let ty_loc = p.loc();
            let ty = p.expr()?;
            let ty = Elaborator::new(&mut k).elaborate(&ty, &Expected::AnySort).map_err(elab_err(ty_loc))?;
            if params.contains(&x) {
                return Err(DenvError::Elab {
                    loc,
                    error: ElabError::Kernel(KernelError::DuplicateVariable(Name::new(&x))),
                });
            }
            params.push(x.as_str(), ty.clone());
            k = Kernel::with_context(env, KernelConfig::default(), params.clone());
            match p.peek() {
                Some(Tok::Comma) => p.bump(),
                _ => break,
            }
        }
    }
    p.expect(&Tok::Triangle)?;
    let name = p.ident("constant name")?;
    p.expect(&Tok::LParen)?;
    let mut header = Vec::new();
    if p.peek() != Some(&Tok::RParen) {
        loop {
            header.push(p.ident("parameter name")?);
            match p.peek() {
                Some(Tok::Comma) => p.bump(),
                _ => break,
            }
        }
    }
    p.expect(&Tok::RParen)?;
    let declared: Vec<&str> = params.names().map(|n| n.as_str()).collect();
    if header != declared {
        return Err(ParseError::new(lineno, 1, format!("the parameters of `{name}` must be {declared:?}")).into());
    }
    p.expect(&Tok::Assign)?;
    let body_loc = p.loc();
    let body = match (p.peek(), p.peek_at(1)) {
        (Some(Tok::Ident(s)), Some(Tok::Colon)) if s == "PN" => {
            p.bump();
            None
        }
        _ => Some(p.expr()?),
    };
    p.expect(&Tok::Colon)?;
    let ty_loc = p.loc();
    let ty = p.expr()?;
    p.finish()?;
    let mut el = Elaborator::new(&mut k);
    let ty = el.elaborate(&ty, &Expected::AnySort).map_err(elab_err(ty_loc))?;
    let body = match body {
        None => Definiens::Primitive,
        Some(m) => Definiens::Term(
            el.elaborate(&m, &Expected::Type(ty.clone())).map_err(elab_err(body_loc))?,
        ),
    };
    Ok(DefEntry { name: Name::new(name), params, body, ty })
}

pub fn print_entry(e: &DefEntry) -> String {
    let params: Vec<String> =
        e.params.iter().map(|(x, ty)| format!("{x} : {}", print_term(ty, Notation::Modern))).collect();
    let names: Vec<&str> = e.params.names().map(|n| n.as_str()).collect();
    let mut s = params.join(", ");
    if !s.is_empty() {
        s.push(' ');
    }
    s.push_str(&format!("|> {}({}) := ", e.name, names.join(",")));
    match &e.body {
        Definiens::Term(m) => s.push_str(&print_term(m, Notation::Modern)),
        Definiens::Primitive => s.push_str("PN"),
    }
    s.push_str(" : ");
    s.push_str(&print_term(&e.ty, Notation::Modern));
    s
}

pub fn print_denv(env: &Env) -> String {
    env.iter().map(|e| print_entry(e) + "\n").collect()
}
