//! Terms of the core calculus.
//!
//! Bound variables are de Bruijn indices (locally nameless representation).
//! A binder keeps the name it was written with, but only as a printing hint:
//! equality on [`Term`] ignores those hints, so `==` is α-equivalence.
//! Free variables and constants are named and live in disjoint name spaces.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

/// An interned-by-sharing identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Name {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for Name {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Name {
        Name(Arc::from(s))
    }
}

impl From<&Name> for Name {
    fn from(n: &Name) -> Name {
        n.clone()
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    /// `∗`: propositions and sets.
    Star,
    /// `□`: the type of `∗`; itself untyped.
    Box,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("arity mismatch: expected {expected} argument(s), found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("telescope variable `{0}` declared twice")]
    DuplicateVariable(Name),
    #[error("type of `{var}` mentions `{free}`, which is not an earlier variable")]
    IllScoped { var: Name, free: Name },
}

#[derive(Clone, Debug)]
pub enum Term {
    Sort(Sort),
    /// Free (named) variable.
    Var(Name),
    /// Bound variable as a de Bruijn index.
    Bound(usize),
    /// Fully instantiated constant `c(L₁,…,Lₙ)`.
    Const(Name, Vec<Term>),
    Lam(Name, Arc<Term>, Arc<Term>),
    Pi(Name, Arc<Term>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl Term {
    pub fn star() -> Term {
        Term::Sort(Sort::Star)
    }

    pub fn boxed() -> Term {
        Term::Sort(Sort::Box)
    }

    pub fn var(x: impl Into<Name>) -> Term {
        Term::Var(x.into())
    }

    pub fn cnst(c: impl Into<Name>, args: Vec<Term>) -> Term {
        Term::Const(c.into(), args)
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// `λx:ann. body`, where `body` refers to `x` as a free variable.
    pub fn lam(x: impl Into<Name>, ann: Term, body: Term) -> Term {
        let x = x.into();
        let body = body.abstract_var(&x);
        Term::Lam(x, Arc::new(ann), Arc::new(body))
    }

    /// `Πx:ann. body`, where `body` refers to `x` as a free variable.
    pub fn pi(x: impl Into<Name>, ann: Term, body: Term) -> Term {
        let x = x.into();
        let body = body.abstract_var(&x);
        Term::Pi(x, Arc::new(ann), Arc::new(body))
    }

    /// Non-dependent product `a → b`.
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::Pi(Name::new("_"), Arc::new(a), Arc::new(b.shift_up(0)))
    }

    pub fn as_sort(&self) -> Option<Sort> {
        match self {
            Term::Sort(s) => Some(*s),
            _ => None,
        }
    }

    /// Replaces free occurrences of `x` by a bound index, for use as the
    /// body of a new binder.
    pub fn abstract_var(&self, x: &str) -> Term {
        self.abstract_at(x, 0)
    }

    fn abstract_at(&self, x: &str, depth: usize) -> Term {
        match self {
            Term::Var(y) if &**y == x => Term::Bound(depth),
            Term::Sort(_) | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| a.abstract_at(x, depth)).collect())
            }
            Term::Lam(n, a, b) => Term::Lam(
                n.clone(),
                Arc::new(a.abstract_at(x, depth)),
                Arc::new(b.abstract_at(x, depth + 1)),
            ),
            Term::Pi(n, a, b) => Term::Pi(
                n.clone(),
                Arc::new(a.abstract_at(x, depth)),
                Arc::new(b.abstract_at(x, depth + 1)),
            ),
            Term::App(f, a) => Term::app(f.abstract_at(x, depth), a.abstract_at(x, depth)),
        }
    }

    /// Increments every loose index `≥ cutoff`. Used when a term is moved
    /// under one extra binder.
    fn shift_up(&self, cutoff: usize) -> Term {
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound(i + 1),
            Term::Sort(_) | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| a.shift_up(cutoff)).collect())
            }
            Term::Lam(n, a, b) => {
                Term::Lam(n.clone(), Arc::new(a.shift_up(cutoff)), Arc::new(b.shift_up(cutoff + 1)))
            }
            Term::Pi(n, a, b) => {
                Term::Pi(n.clone(), Arc::new(a.shift_up(cutoff)), Arc::new(b.shift_up(cutoff + 1)))
            }
            Term::App(f, a) => Term::app(f.shift_up(cutoff), a.shift_up(cutoff)),
        }
    }

    /// Instantiates the outermost loose index of a binder body with `value`.
    /// `value` must be locally closed.
    pub fn open(&self, value: &Term) -> Term {
        self.open_at(value, 0)
    }

    fn open_at(&self, value: &Term, depth: usize) -> Term {
        match self {
            Term::Bound(i) if *i == depth => value.clone(),
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::Sort(_) | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| a.open_at(value, depth)).collect())
            }
            Term::Lam(n, a, b) => Term::Lam(
                n.clone(),
                Arc::new(a.open_at(value, depth)),
                Arc::new(b.open_at(value, depth + 1)),
            ),
            Term::Pi(n, a, b) => Term::Pi(
                n.clone(),
                Arc::new(a.open_at(value, depth)),
                Arc::new(b.open_at(value, depth + 1)),
            ),
            Term::App(f, a) => Term::app(f.open_at(value, depth), a.open_at(value, depth)),
        }
    }

    /// Capture-avoiding substitution `self[x := value]`.
    ///
    /// Binders are nameless, so no renaming is ever needed; `value` must be
    /// locally closed, which holds for every term built through the public
    /// constructors.
    pub fn subst(&self, x: &str, value: &Term) -> Term {
        if !self.has_free_var(x) {
            return self.clone();
        }
        match self {
            Term::Var(y) if &**y == x => value.clone(),
            Term::Sort(_) | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| a.subst(x, value)).collect())
            }
            Term::Lam(n, a, b) => {
                Term::Lam(n.clone(), Arc::new(a.subst(x, value)), Arc::new(b.subst(x, value)))
            }
            Term::Pi(n, a, b) => {
                Term::Pi(n.clone(), Arc::new(a.subst(x, value)), Arc::new(b.subst(x, value)))
            }
            Term::App(f, a) => Term::app(f.subst(x, value), a.subst(x, value)),
        }
    }

    /// Simultaneous substitution of every mapped free variable.
    pub fn subst_many(&self, map: &HashMap<Name, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(y) => map.get(y).cloned().unwrap_or_else(|| self.clone()),
            Term::Sort(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| a.subst_many(map)).collect())
            }
            Term::Lam(n, a, b) => {
                Term::Lam(n.clone(), Arc::new(a.subst_many(map)), Arc::new(b.subst_many(map)))
            }
            Term::Pi(n, a, b) => {
                Term::Pi(n.clone(), Arc::new(a.subst_many(map)), Arc::new(b.subst_many(map)))
            }
            Term::App(f, a) => Term::app(f.subst_many(map), a.subst_many(map)),
        }
    }

    pub fn has_free_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Sort(_) | Term::Bound(_) => false,
            Term::Const(_, args) => args.iter().any(|a| a.has_free_var(x)),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.has_free_var(x) || b.has_free_var(x),
            Term::App(f, a) => f.has_free_var(x) || a.has_free_var(x),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::Var(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::Const(c, _) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Pre-order traversal of every subterm.
    pub fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Sort(_) | Term::Var(_) | Term::Bound(_) => {}
            Term::Const(_, args) => args.iter().for_each(|a| a.walk(f)),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::App(g, a) => {
                g.walk(f);
                a.walk(f);
            }
        }
    }

    /// Whether the body of a binder mentions the bound variable.
    pub fn uses_bound(&self, depth: usize) -> bool {
        match self {
            Term::Bound(i) => *i == depth,
            Term::Sort(_) | Term::Var(_) => false,
            Term::Const(_, args) => args.iter().any(|a| a.uses_bound(depth)),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.uses_bound(depth) || b.uses_bound(depth + 1),
            Term::App(f, a) => f.uses_bound(depth) || a.uses_bound(depth),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::Bound(i) => *i < depth,
                Term::Sort(_) | Term::Var(_) => true,
                Term::Const(_, args) => args.iter().all(|a| go(a, depth)),
                Term::Lam(_, a, b) | Term::Pi(_, a, b) => go(a, depth) && go(b, depth + 1),
                Term::App(f, a) => go(f, depth) && go(a, depth),
            }
        }
        go(self, 0)
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Splits an application spine into its head and arguments.
    pub fn unapply(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }
}

/// `body[x := value]`.
pub fn subst(body: &Term, x: &str, value: &Term) -> Term {
    body.subst(x, value)
}

/// α-equivalence: structural equality ignoring binder hints.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Sort(s), Term::Sort(t)) => s == t,
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Bound(i), Term::Bound(j)) => i == j,
        (Term::Const(c, xs), Term::Const(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq(x, y))
        }
        (Term::Lam(_, a1, b1), Term::Lam(_, a2, b2)) | (Term::Pi(_, a1, b1), Term::Pi(_, a2, b2)) => {
            (Arc::ptr_eq(a1, a2) || alpha_eq(a1, a2)) && (Arc::ptr_eq(b1, b2) || alpha_eq(b1, b2))
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => alpha_eq(f1, f2) && alpha_eq(a1, a2),
        _ => false,
    }
}

pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    t.free_vars()
}

/// An ordered list of variable declarations `x₁:A₁, …, xₙ:Aₙ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Telescope(Vec<(Name, Term)>);

impl Telescope {
    pub fn new() -> Telescope {
        Telescope(Vec::new())
    }

    pub fn push(&mut self, x: impl Into<Name>, ty: Term) {
        self.0.push((x.into(), ty));
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (Name, Term)> {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> + '_ {
        self.0.iter().map(|(x, _)| x)
    }

    /// Type of the innermost declaration of `x`.
    pub fn lookup(&self, x: &str) -> Option<&Term> {
        self.0.iter().rev().find(|(y, _)| &**y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.iter().any(|(y, _)| &**y == x)
    }

    pub fn as_slice(&self) -> &[(Name, Term)] {
        &self.0
    }

    /// The telescope's own variables, as terms.
    pub fn vars(&self) -> Vec<Term> {
        self.0.iter().map(|(x, _)| Term::Var(x.clone())).collect()
    }

    /// Distinct names, each type mentioning only earlier variables.
    pub fn check_well_scoped(&self) -> Result<(), TermError> {
        let mut seen: Vec<&Name> = Vec::new();
        for (x, ty) in &self.0 {
            if seen.contains(&x) {
                return Err(TermError::DuplicateVariable(x.clone()));
            }
            if let Some(free) = ty.free_vars().into_iter().find(|v| !seen.contains(&v)) {
                return Err(TermError::IllScoped { var: x.clone(), free });
            }
            seen.push(x);
        }
        Ok(())
    }

    /// Substitution mapping the first `args.len()` variables to `args`.
    pub fn bind(&self, args: &[Term]) -> HashMap<Name, Term> {
        self.0.iter().map(|(x, _)| x.clone()).zip(args.iter().cloned()).collect()
    }
}

impl FromIterator<(Name, Term)> for Telescope {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Telescope {
        Telescope(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Telescope {
    type Item = &'a (Name, Term);
    type IntoIter = std::slice::Iter<'a, (Name, Term)>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `target[x̄ := args]` for the telescope's variables `x̄`.
///
/// The substitution is simultaneous: an argument may itself mention a
/// telescope variable (e.g. `IMP(B, A)` inside the context `A, B`) without
/// being rewritten by a later binding.
pub fn instantiate(tele: &Telescope, target: &Term, args: &[Term]) -> Result<Term, TermError> {
    if tele.len() != args.len() {
        return Err(TermError::ArityMismatch { expected: tele.len(), found: args.len() });
    }
    Ok(target.subst_many(&tele.bind(args)))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_term(self, crate::syntax::Notation::Judgement))
    }
}
