//! Automath books: sequences of assumption, definition and primitive lines,
//! checked one line at a time.
//!
//! Each definition or primitive line `z * c := M/PN ; A` extends the
//! environment with `Γ_z ▷ c(γ_z) := M/PN : A`, where `Γ_z` is the chain of
//! assumptions ending in the indicator `z`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{Counters, DefEntry, Definiens, Env, Kernel, KernelConfig, KernelError};
use crate::syntax::{
    parse_book, print_term, Dialect, ElabError, ElabStats, Elaborator, Expected, Notation, ParseError,
    RawContent, RawLine, SourceLoc,
};
use crate::term::{Name, Telescope, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Content {
    /// `---`: the line declares a variable.
    Dash,
    Primitive,
    Def(Term),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LineKind {
    Assumption,
    Definition,
    Primitive,
}

/// An elaborated book line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub indicator: Option<Name>,
    pub identifier: Name,
    pub content: Content,
    pub category: Term,
    pub loc: SourceLoc,
}

impl Line {
    pub fn kind(&self) -> LineKind {
        match self.content {
            Content::Dash => LineKind::Assumption,
            Content::Primitive => LineKind::Primitive,
            Content::Def(_) => LineKind::Definition,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BookErrorKind {
    #[error("identifier `{0}` is already declared")]
    NotFresh(String),
    #[error("indicator `{indicator}` {reason}")]
    DanglingIndicator { indicator: String, reason: String },
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl BookErrorKind {
    pub fn class(&self) -> &'static str {
        match self {
            BookErrorKind::NotFresh(_) => "NotFresh",
            BookErrorKind::DanglingIndicator { .. } => "DanglingIndicator",
            BookErrorKind::Elab(e) => e.class(),
            BookErrorKind::Kernel(e) => e.class(),
            BookErrorKind::Parse(_) => "ParseError",
        }
    }
}

/// A failed line, with its location and the judgement being attempted.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{loc}: error[{}]: {kind}", kind.class())]
pub struct BookError {
    pub loc: SourceLoc,
    pub kind: BookErrorKind,
    /// `Check: …` text of the failed obligation, when one was formed.
    pub judgement: Option<String>,
}

impl BookError {
    pub fn class(&self) -> &'static str {
        self.kind.class()
    }

    fn at(loc: SourceLoc, kind: impl Into<BookErrorKind>) -> BookError {
        BookError { loc, kind: kind.into(), judgement: None }
    }
}

/// The judgement `Δ ; Γ ⊢ subject : ty` discharged for one line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub kind: LineKind,
    pub line_index: usize,
    /// Length of the environment prefix `Δ` in force.
    pub env_len: usize,
    pub ctx: Telescope,
    pub subject: Term,
    pub ty: Term,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LineCounts {
    pub assumptions: usize,
    pub definitions: usize,
    pub primitives: usize,
    pub total: usize,
}

/// Duplicate identifiers and bad indicators found by [`Book::check_coherent`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoherenceReport {
    pub duplicates: Vec<(usize, Name)>,
    pub dangling: Vec<(usize, Name)>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.duplicates.is_empty() && self.dangling.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Book {
    lines: Vec<Line>,
    index: HashMap<Name, usize>,
    env: Env,
    cfg: KernelConfig,
    ok: bool,
    counters: Counters,
    stats: ElabStats,
    obligations: Vec<Obligation>,
}

impl Default for Book {
    fn default() -> Book {
        Book::new(KernelConfig::default())
    }
}

impl Book {
    pub fn new(cfg: KernelConfig) -> Book {
        Book {
            lines: Vec::new(),
            index: HashMap::new(),
            env: Env::new(),
            cfg,
            ok: true,
            counters: Counters::default(),
            stats: ElabStats::default(),
            obligations: Vec::new(),
        }
    }

    /// Parses and checks a whole text, stopping at the first bad line.
    pub fn check_text(text: &str, dialect: Dialect, cfg: KernelConfig) -> Result<Book, BookError> {
        let raw = parse_book(text, dialect).map_err(|e| BookError::at(e.loc, e))?;
        let mut book = Book::new(cfg);
        for line in &raw {
            book.add_line(line)?;
        }
        Ok(book)
    }

    /// Re-checks already elaborated lines.
    pub fn from_lines(lines: Vec<Line>, cfg: KernelConfig) -> Result<Book, BookError> {
        let mut book = Book::new(cfg);
        for line in lines {
            book.push(line)?;
        }
        Ok(book)
    }

    /// Assembles a book without checking it. The result is marked not ok; its
    /// environment holds whatever definition lines could be added.
    pub fn from_lines_unchecked(lines: Vec<Line>) -> Book {
        let mut book = Book::new(KernelConfig::default());
        book.ok = false;
        for (i, line) in lines.iter().enumerate() {
            book.index.entry(line.identifier.clone()).or_insert(i);
        }
        for (i, line) in lines.iter().enumerate() {
            if line.kind() != LineKind::Assumption {
                let entry = book.entry_for(&lines[..i], line);
                let _ = book.env.push(entry);
            }
        }
        book.lines = lines;
        book
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn config(&self) -> KernelConfig {
        self.cfg
    }

    /// Every line passed the checker.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn elab_stats(&self) -> ElabStats {
        self.stats
    }

    pub fn obligations(&self) -> &[Obligation] {
        &self.obligations
    }

    pub fn position(&self, identifier: &str) -> Option<usize> {
        self.index.get(identifier).copied()
    }

    pub fn line(&self, identifier: &str) -> Option<&Line> {
        self.position(identifier).map(|i| &self.lines[i])
    }

    pub fn counts(&self) -> LineCounts {
        let mut c = LineCounts { total: self.lines.len(), ..LineCounts::default() };
        for l in &self.lines {
            match l.kind() {
                LineKind::Assumption => c.assumptions += 1,
                LineKind::Definition => c.definitions += 1,
                LineKind::Primitive => c.primitives += 1,
            }
        }
        c
    }

    /// `γ_z`: the assumption variables in scope under indicator `z`, outermost first.
    pub fn subject_list(&self, indicator: Option<&str>) -> Vec<Name> {
        self.typing_context(indicator).names().cloned().collect()
    }

    /// `Γ_z`: the declarations in scope under indicator `z`.
    pub fn typing_context(&self, indicator: Option<&str>) -> Telescope {
        context_in(&self.lines, &self.index, indicator)
    }

    pub fn check_coherent(&self) -> CoherenceReport {
        let mut seen: HashMap<&Name, usize> = HashMap::new();
        let mut report = CoherenceReport::default();
        for (i, l) in self.lines.iter().enumerate() {
            if let Some(z) = &l.indicator {
                let good = seen.get(z).is_some_and(|&j| self.lines[j].kind() == LineKind::Assumption);
                if !good {
                    report.dangling.push((i, z.clone()));
                }
            }
            if seen.insert(&l.identifier, i).is_some() {
                report.duplicates.push((i, l.identifier.clone()));
            }
        }
        report
    }

    /// Elaborates and checks one parsed line, then appends it.
    pub fn add_line(&mut self, raw: &RawLine) -> Result<Obligation, BookError> {
        let indicator = raw.indicator.as_deref().map(Name::new);
        let identifier = Name::new(&raw.identifier);
        self.check_freshness(&identifier, indicator.as_ref(), raw.loc)?;
        let ctx = self.typing_context(indicator.as_deref());
        let mut k = Kernel::with_context(&self.env, self.cfg, ctx);
        let mut el = Elaborator::new(&mut k);
        let at = |loc: SourceLoc| move |e: ElabError| BookError::at(loc, e);
        let category = el.elaborate(&raw.category, &Expected::AnySort).map_err(at(raw.category_loc))?;
        let content = match &raw.content {
            RawContent::Dash => Content::Dash,
            RawContent::Primitive => Content::Primitive,
            RawContent::Expr(e) => {
                let m = el.elaborate(e, &Expected::Type(category.clone())).map_err(at(raw.content_loc))?;
                Content::Def(m)
            }
        };
        let stats = el.stats();
        self.counters += k.take_counters();
        let ob = self.push(Line { indicator, identifier, content, category, loc: raw.loc })?;
        self.stats += stats;
        Ok(ob)
    }

    /// Checks an elaborated line against the book so far and appends it.
    pub fn push(&mut self, line: Line) -> Result<Obligation, BookError> {
        self.check_freshness(&line.identifier, line.indicator.as_ref(), line.loc)?;
        let ctx = self.typing_context(line.indicator.as_deref());
        let mut k = Kernel::with_context(&self.env, self.cfg, ctx.clone());
        let mut ob = Obligation {
            kind: line.kind(),
            line_index: self.lines.len(),
            env_len: self.env.len(),
            ctx,
            subject: line.category.clone(),
            ty: Term::boxed(),
        };
        let result = match &line.content {
            Content::Dash | Content::Primitive => k.sort_of_query(&line.category).map(|s| ob.ty = Term::Sort(s)),
            Content::Def(m) => {
                ob.subject = m.clone();
                ob.ty = line.category.clone();
                k.check_type(m, &line.category)
            }
        };
        self.counters += k.take_counters();
        if let Err(e) = result {
            let judgement = match (&line.content, &e) {
                // the category itself had no sort: there is no `: s` to show
                (Content::Dash | Content::Primitive, _) => self.render_judgement(&ob, None),
                _ => self.render_judgement(&ob, Some(&ob.ty)),
            };
            return Err(BookError { loc: line.loc, kind: e.into(), judgement: Some(judgement) });
        }
        if line.kind() != LineKind::Assumption {
            let entry = self.entry_for(&self.lines, &line);
            self.env.push(entry).map_err(|e| BookError::at(line.loc, e))?;
        }
        self.index.insert(line.identifier.clone(), self.lines.len());
        self.lines.push(line);
        self.obligations.push(ob.clone());
        Ok(ob)
    }

    fn check_freshness(&self, id: &Name, indicator: Option<&Name>, loc: SourceLoc) -> Result<(), BookError> {
        if self.index.contains_key(id) || self.env.get(id).is_some() {
            return Err(BookError::at(loc, BookErrorKind::NotFresh(id.to_string())));
        }
        if let Some(z) = indicator {
            let reason = match self.line(z) {
                None => "does not name an earlier line",
                Some(l) if l.kind() != LineKind::Assumption => "names a line that is not an assumption",
                Some(_) => return Ok(()),
            };
            return Err(BookError::at(
                loc,
                BookErrorKind::DanglingIndicator { indicator: z.to_string(), reason: reason.into() },
            ));
        }
        Ok(())
    }

    fn entry_for(&self, before: &[Line], line: &Line) -> DefEntry {
        let index: HashMap<Name, usize> =
            before.iter().enumerate().map(|(i, l)| (l.identifier.clone(), i)).collect();
        DefEntry {
            name: line.identifier.clone(),
            params: context_in(before, &index, line.indicator.as_deref()),
            body: match &line.content {
                Content::Def(m) => Definiens::Term(m.clone()),
                _ => Definiens::Primitive,
            },
            ty: line.category.clone(),
        }
    }

    /// `⟶ Check: Δ ; Γ ⊢ subject : ty`.
    pub fn render_obligation(&self, ob: &Obligation) -> String {
        self.render_judgement(ob, Some(&ob.ty))
    }

    fn render_judgement(&self, ob: &Obligation, ty: Option<&Term>) -> String {
        let delta: Vec<String> = self.env.entries()[..ob.env_len].iter().map(render_entry).collect();
        let delta = if delta.is_empty() { "∅".to_string() } else { delta.join(", ") };
        let mut s = format!("⟶ Check: {delta} ; {} ⊢ {}", render_context(&ob.ctx), judge(&ob.subject));
        if let Some(ty) = ty {
            s.push_str(" : ");
            s.push_str(&judge(ty));
        }
        s
    }
}

fn judge(t: &Term) -> String {
    print_term(t, Notation::Judgement)
}

fn context_in(lines: &[Line], index: &HashMap<Name, usize>, indicator: Option<&str>) -> Telescope {
    let mut chain = Vec::new();
    let mut cur = indicator;
    while let Some(z) = cur {
        let Some(&i) = index.get(z) else { break };
        let l = &lines[i];
        if l.kind() != LineKind::Assumption || chain.len() > lines.len() {
            break;
        }
        chain.push((l.identifier.clone(), l.category.clone()));
        cur = l.indicator.as_deref();
    }
    chain.into_iter().rev().collect()
}

/// `c(x̄) := M : A`, parameters shown by name only.
fn render_entry(e: &DefEntry) -> String {
    let head = Term::Const(e.name.clone(), e.params.vars());
    let body = match &e.body {
        Definiens::Term(m) => judge(m),
        Definiens::Primitive => "PN".to_string(),
    };
    format!("{} := {} : {}", judge(&head), body, judge(&e.ty))
}

/// `x, y : A, z : B` with runs of equal types grouped.
pub(crate) fn render_context(ctx: &Telescope) -> String {
    if ctx.is_empty() {
        return "∅".to_string();
    }
    let mut groups: Vec<(Vec<&Name>, &Term)> = Vec::new();
    for (x, ty) in ctx.iter() {
        match groups.last_mut() {
            Some((names, t)) if *t == ty => names.push(x),
            _ => groups.push((vec![x], ty)),
        }
    }
    groups
        .into_iter()
        .map(|(names, ty)| {
            let names: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
            format!("{} : {}", names.join(", "), judge(ty))
        })
        .collect::<Vec<_>>()
        .join(", ")
}
