//! The type checker: β/δ(/η) reduction, weak-head normalization,
//! definitional equality and the judgement `Δ ; Γ ⊢ M : N`.
//!
//! Typing is bidirectional and syntax-directed. All four product rules
//! `(s₁, s₂)` are admitted. Conversion unfolds definitions lazily: when both
//! sides are headed by the same constant the arguments are compared first,
//! and otherwise the constant defined later is unfolded first.

use std::collections::HashMap;
use std::ops::AddAssign;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::term::{alpha_eq, Name, Sort, Telescope, Term};

/// The right-hand side of a definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definiens {
    Term(Term),
    /// A primitive notion (`PN`): typed, never unfolded.
    Primitive,
}

/// One definition `x̄:Ā ▷ c(x̄) := M/PN : A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefEntry {
    pub name: Name,
    pub params: Telescope,
    pub body: Definiens,
    pub ty: Term,
}

impl DefEntry {
    pub fn is_primitive(&self) -> bool {
        matches!(self.body, Definiens::Primitive)
    }

    pub fn body_term(&self) -> Option<&Term> {
        match &self.body {
            Definiens::Term(t) => Some(t),
            Definiens::Primitive => None,
        }
    }

    /// α-equality after renaming `other`'s parameters to ours.
    pub fn alpha_eq_up_to_renaming(&self, other: &DefEntry) -> bool {
        if self.name != other.name || self.params.len() != other.params.len() {
            return false;
        }
        let rename = other.params.bind(&self.params.vars());
        let same_params = self
            .params
            .iter()
            .zip(other.params.iter())
            .all(|((_, a), (_, b))| alpha_eq(a, &b.subst_many(&rename)));
        let same_body = match (&self.body, &other.body) {
            (Definiens::Primitive, Definiens::Primitive) => true,
            (Definiens::Term(m), Definiens::Term(n)) => alpha_eq(m, &n.subst_many(&rename)),
            _ => false,
        };
        same_params && same_body && alpha_eq(&self.ty, &other.ty.subst_many(&rename))
    }
}

/// The definition environment `Δ`.
#[derive(Clone, Debug, Default)]
pub struct Env {
    entries: Vec<DefEntry>,
    index: HashMap<Name, usize>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    /// Appends an entry without type checking it.
    pub fn push(&mut self, entry: DefEntry) -> Result<(), KernelError> {
        if self.index.contains_key(&entry.name) {
            return Err(KernelError::DuplicateConstant(entry.name));
        }
        self.index.insert(entry.name.clone(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn get(&self, c: &str) -> Option<&DefEntry> {
        self.index.get(c).map(|&i| &self.entries[i])
    }

    pub fn position(&self, c: &str) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[DefEntry] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DefEntry> {
        self.entries.iter()
    }

    /// The first `len` entries.
    pub fn truncated(&self, len: usize) -> Env {
        let mut env = Env::new();
        for e in self.entries.iter().take(len) {
            env.push(e.clone()).expect("names already unique");
        }
        env
    }

    /// Type checks `entry` against this environment:
    /// the telescope is well-formed, and `M : A` (or `A : s` for a primitive).
    pub fn check_entry(&self, entry: &DefEntry, cfg: KernelConfig) -> Result<Counters, KernelError> {
        if self.index.contains_key(&entry.name) {
            return Err(KernelError::DuplicateConstant(entry.name.clone()));
        }
        let mut k = Kernel::new(self, cfg);
        for (x, ty) in entry.params.iter() {
            if k.ctx.contains(x) {
                return Err(KernelError::DuplicateVariable(x.clone()));
            }
            k.sort_of_query(ty)?;
            k.ctx.push(x.clone(), ty.clone());
        }
        match &entry.body {
            Definiens::Term(m) => k.check_type(m, &entry.ty)?,
            Definiens::Primitive => {
                k.sort_of_query(&entry.ty)?;
            }
        }
        Ok(k.counters)
    }

    /// Re-checks every entry against its predecessors. On failure, reports the
    /// index of the first illegal entry.
    pub fn check_legal(&self, cfg: KernelConfig) -> Result<Counters, (usize, KernelError)> {
        let mut prefix = Env::new();
        let mut total = Counters::default();
        for (i, e) in self.entries.iter().enumerate() {
            total += prefix.check_entry(e, cfg).map_err(|err| (i, err))?;
            prefix.push(e.clone()).map_err(|err| (i, err))?;
        }
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeltaStrategy {
    /// Compare same-headed constants by their arguments before unfolding.
    #[default]
    Lazy,
    /// Weak-head normalize both sides fully before comparing.
    Eager,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelConfig {
    pub eta_enabled: bool,
    /// Upper bound on δ-unfoldings per top-level query; `None` is unlimited.
    pub delta_fuel: Option<u64>,
    pub delta_strategy: DeltaStrategy,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { eta_enabled: false, delta_fuel: None, delta_strategy: DeltaStrategy::Lazy }
    }
}

impl KernelConfig {
    pub fn with_eta(mut self, on: bool) -> Self {
        self.eta_enabled = on;
        self
    }
}

/// Reduction step tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub beta: u64,
    pub delta: u64,
    pub eta: u64,
}

impl AddAssign for Counters {
    fn add_assign(&mut self, o: Counters) {
        self.beta += o.beta;
        self.delta += o.delta;
        self.eta += o.eta;
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("sort error: `{term}` has no type")]
    Untypable { term: Term },
    #[error("sort error: `{term}` has type `{ty}`, which is not a sort")]
    SortError { term: Term, ty: Term },
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(Name),
    #[error("loose bound index {0}")]
    LooseIndex(usize),
    #[error("`{term}` is not a function; its type is `{ty}`")]
    NotAFunction { term: Term, ty: Term },
    #[error("type mismatch for `{term}`: expected `{expected}`, found `{actual}`")]
    TypeMismatch { term: Term, expected: Term, actual: Term },
    #[error("`{constant}` expects {expected} argument(s), found {found}")]
    ArityMismatch { constant: Name, expected: usize, found: usize },
    #[error("δ-fuel exhausted")]
    FuelExhausted,
    #[error("`{0}` is a primitive notion and cannot be unfolded")]
    UnfoldPrimitive(Name),
    #[error("constant `{0}` is already defined")]
    DuplicateConstant(Name),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(Name),
}

impl KernelError {
    /// Stable error class name, used by reports.
    pub fn class(&self) -> &'static str {
        match self {
            KernelError::Untypable { .. } | KernelError::SortError { .. } => "SortError",
            KernelError::UnboundIdentifier(_) | KernelError::LooseIndex(_) => "UnboundIdentifier",
            KernelError::NotAFunction { .. } => "NotAFunction",
            KernelError::TypeMismatch { .. } => "TypeMismatch",
            KernelError::ArityMismatch { .. } => "ArityMismatch",
            KernelError::FuelExhausted => "FuelExhausted",
            KernelError::UnfoldPrimitive(_) => "UnfoldPrimitive",
            KernelError::DuplicateConstant(_) | KernelError::DuplicateVariable(_) => "NotFresh",
        }
    }
}

pub type KResult<T> = Result<T, KernelError>;

/// `c(args)` replaced by its instantiated definiens.
pub fn delta_unfold(env: &Env, c: &str, args: &[Term]) -> KResult<Term> {
    let entry = env.get(c).ok_or_else(|| KernelError::UnboundIdentifier(Name::new(c)))?;
    unfold_entry(entry, args)
}

fn unfold_entry(entry: &DefEntry, args: &[Term]) -> KResult<Term> {
    let body = match &entry.body {
        Definiens::Term(t) => t,
        Definiens::Primitive => return Err(KernelError::UnfoldPrimitive(entry.name.clone())),
    };
    if args.len() != entry.params.len() {
        return Err(KernelError::ArityMismatch {
            constant: entry.name.clone(),
            expected: entry.params.len(),
            found: args.len(),
        });
    }
    Ok(body.subst_many(&entry.params.bind(args)))
}

pub fn whnf(env: &Env, cfg: KernelConfig, t: &Term) -> KResult<Term> {
    Kernel::new(env, cfg).whnf(t)
}

pub fn normalize(env: &Env, cfg: KernelConfig, t: &Term) -> KResult<Term> {
    Kernel::new(env, cfg).normalize(t)
}

pub fn convertible(env: &Env, cfg: KernelConfig, a: &Term, b: &Term) -> KResult<bool> {
    Kernel::new(env, cfg).convertible(a, b)
}

pub fn infer_type(env: &Env, ctx: &Telescope, t: &Term) -> KResult<Term> {
    Kernel::with_context(env, KernelConfig::default(), ctx.clone()).infer(t)
}

pub fn check_type(env: &Env, ctx: &Telescope, t: &Term, expected: &Term) -> KResult<()> {
    Kernel::with_context(env, KernelConfig::default(), ctx.clone()).check_type(t, expected)
}

/// A checking session over a fixed environment and a growable context.
pub struct Kernel<'e> {
    env: &'e Env,
    cfg: KernelConfig,
    ctx: Telescope,
    counters: Counters,
    fuel: Option<u64>,
    fresh: usize,
}

impl<'e> Kernel<'e> {
    pub fn new(env: &'e Env, cfg: KernelConfig) -> Kernel<'e> {
        Kernel::with_context(env, cfg, Telescope::new())
    }

    pub fn with_context(env: &'e Env, cfg: KernelConfig, ctx: Telescope) -> Kernel<'e> {
        Kernel { env, cfg, ctx, counters: Counters::default(), fuel: cfg.delta_fuel, fresh: 0 }
    }

    pub fn env(&self) -> &'e Env {
        self.env
    }

    pub fn config(&self) -> KernelConfig {
        self.cfg
    }

    pub fn context(&self) -> &Telescope {
        &self.ctx
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn take_counters(&mut self) -> Counters {
        std::mem::take(&mut self.counters)
    }

    /// A variable name that no surface identifier can spell.
    pub fn fresh_name(&mut self, hint: &str) -> Name {
        self.fresh += 1;
        let base = hint.split('#').next().unwrap_or(hint);
        Name::from(format!("{}#{}", base, self.fresh))
    }

    /// Declares a fresh variable of type `ty` in the context.
    pub fn push_fresh(&mut self, hint: &str, ty: Term) -> Name {
        let x = self.fresh_name(hint);
        self.ctx.push(x.clone(), ty);
        x
    }

    pub fn truncate_context(&mut self, len: usize) {
        let kept: Telescope = self.ctx.iter().take(len).cloned().collect();
        self.ctx = kept;
    }

    fn begin_query(&mut self) {
        self.fuel = self.cfg.delta_fuel;
    }

    fn spend_fuel(&mut self) -> KResult<()> {
        if let Some(f) = self.fuel.as_mut() {
            if *f == 0 {
                return Err(KernelError::FuelExhausted);
            }
            *f -= 1;
        }
        self.counters.delta += 1;
        Ok(())
    }

    /// Position in `Δ` of an unfoldable constant heading `t`'s spine.
    fn unfoldable_head(&self, t: &Term) -> Option<usize> {
        match t.unapply().0 {
            Term::Const(c, _) => {
                let i = self.env.position(c)?;
                (!self.env.entries()[i].is_primitive()).then_some(i)
            }
            _ => None,
        }
    }

    fn reduce_head(&mut self, t: &Term, delta: bool) -> KResult<Term> {
        let (head, args) = t.unapply();
        let mut head = head.clone();
        let mut args: Vec<Term> = args.into_iter().cloned().collect();
        let mut next = 0;
        loop {
            match &head {
                Term::Lam(_, _, body) | Term::Pi(_, _, body) if next < args.len() => {
                    let reduced = body.open(&args[next]);
                    next += 1;
                    self.counters.beta += 1;
                    head = reduced;
                }
                Term::App(..) => {
                    let (h, inner) = head.unapply();
                    let mut spine: Vec<Term> = inner.into_iter().cloned().collect();
                    spine.extend(args.drain(next..));
                    let h = h.clone();
                    args = spine;
                    next = 0;
                    head = h;
                }
                Term::Const(c, cargs) if delta => match self.env.get(c) {
                    Some(entry) if !entry.is_primitive() => {
                        let unfolded = unfold_entry(entry, cargs)?;
                        self.spend_fuel()?;
                        head = unfolded;
                    }
                    _ => break,
                },
                _ => break,
            }
        }
        Ok(Term::apps(head, args.drain(next..)))
    }

    /// β-only weak-head normal form.
    pub fn whnf_core(&mut self, t: &Term) -> Term {
        self.reduce_head(t, false).expect("β-reduction cannot fail")
    }

    pub fn whnf(&mut self, t: &Term) -> KResult<Term> {
        self.begin_query();
        self.reduce_head(t, true)
    }

    /// Full βδ-normal form.
    pub fn normalize(&mut self, t: &Term) -> KResult<Term> {
        self.begin_query();
        self.nf(t)
    }

    fn nf(&mut self, t: &Term) -> KResult<Term> {
        let w = self.reduce_head(t, true)?;
        Ok(match &w {
            Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
                let na = self.nf(a)?;
                let y = self.fresh_name(x);
                let nb = self.nf(&b.open(&Term::Var(y.clone())))?.abstract_var(&y);
                if matches!(w, Term::Lam(..)) {
                    Term::Lam(x.clone(), Arc::new(na), Arc::new(nb))
                } else {
                    Term::Pi(x.clone(), Arc::new(na), Arc::new(nb))
                }
            }
            Term::App(..) => {
                let (head, args) = w.unapply();
                let head = self.nf(head)?;
                let args = args.into_iter().map(|a| self.nf(a)).collect::<KResult<Vec<_>>>()?;
                Term::apps(head, args)
            }
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| self.nf(a)).collect::<KResult<_>>()?)
            }
            _ => w,
        })
    }

    /// β/δ(/η)-convertibility.
    pub fn convertible(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        self.begin_query();
        self.conv(a, b)
    }

    fn conv(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        let mut a = self.whnf_core(a);
        let mut b = self.whnf_core(b);
        if self.cfg.delta_strategy == DeltaStrategy::Eager {
            let a = self.reduce_head(&a, true)?;
            let b = self.reduce_head(&b, true)?;
            return self.conv_whnf(&a, &b);
        }
        loop {
            if alpha_eq(&a, &b) {
                return Ok(true);
            }
            match (self.unfoldable_head(&a), self.unfoldable_head(&b)) {
                (None, None) => return self.conv_whnf(&a, &b),
                (Some(i), Some(j)) if i == j => {
                    if self.same_spine_args(&a, &b)? {
                        return Ok(true);
                    }
                    a = self.delta_head(&a)?;
                    b = self.delta_head(&b)?;
                }
                (Some(i), Some(j)) if i > j => a = self.delta_head(&a)?,
                (Some(_), Some(_)) | (None, Some(_)) => b = self.delta_head(&b)?,
                (Some(_), None) => a = self.delta_head(&a)?,
            }
            a = self.whnf_core(&a);
            b = self.whnf_core(&b);
        }
    }

    /// Unfolds the constant heading the spine of `t`, once.
    fn delta_head(&mut self, t: &Term) -> KResult<Term> {
        let (head, args) = t.unapply();
        let Term::Const(c, cargs) = head else { return Ok(t.clone()) };
        let unfolded = delta_unfold(self.env, c, cargs)?;
        self.spend_fuel()?;
        Ok(Term::apps(unfolded, args.into_iter().cloned()))
    }

    fn same_spine_args(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        let (ha, xs) = a.unapply();
        let (hb, ys) = b.unapply();
        let (Term::Const(_, ca), Term::Const(_, cb)) = (ha, hb) else { return Ok(false) };
        if ca.len() != cb.len() || xs.len() != ys.len() {
            return Ok(false);
        }
        for (x, y) in ca.iter().zip(cb).chain(xs.into_iter().zip(ys)) {
            if !self.conv(x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Structural comparison of two terms already in weak-head normal form.
    fn conv_whnf(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        match (a, b) {
            (Term::Sort(s), Term::Sort(t)) => Ok(s == t),
            (Term::Var(x), Term::Var(y)) => Ok(x == y),
            (Term::Lam(x, a1, b1), Term::Lam(_, a2, b2)) | (Term::Pi(x, a1, b1), Term::Pi(_, a2, b2)) => {
                if !self.conv(a1, a2)? {
                    return Ok(false);
                }
                let y = Term::Var(self.fresh_name(x));
                self.conv(&b1.open(&y), &b2.open(&y))
            }
            (Term::Const(c, xs), Term::Const(d, ys)) => {
                if c != d || xs.len() != ys.len() {
                    return Ok(false);
                }
                for (x, y) in xs.iter().zip(ys) {
                    if !self.conv(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Term::Lam(x, _, body), other) | (other, Term::Lam(x, _, body)) if self.cfg.eta_enabled => {
                self.counters.eta += 1;
                let y = Term::Var(self.fresh_name(x));
                self.conv(&body.open(&y), &Term::app(other.clone(), y))
            }
            (Term::App(..), Term::App(..)) => {
                let (ha, xs) = a.unapply();
                let (hb, ys) = b.unapply();
                if xs.len() != ys.len() || !self.conv_whnf(ha, hb)? {
                    return Ok(false);
                }
                for (x, y) in xs.into_iter().zip(ys) {
                    if !self.conv(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Infers the type of `t` in the current context.
    pub fn infer(&mut self, t: &Term) -> KResult<Term> {
        self.begin_query();
        self.infer_term(t)
    }

    /// Accepts iff `expected` is `□` or a type, and `t : expected` up to conversion.
    pub fn check_type(&mut self, t: &Term, expected: &Term) -> KResult<()> {
        self.begin_query();
        if expected.as_sort() != Some(Sort::Box) {
            self.sort_of(expected)?;
        }
        self.check_against(t, expected)
    }

    /// The sort `s` with `Γ ⊢ t : s`.
    pub fn sort_of_query(&mut self, t: &Term) -> KResult<Sort> {
        self.begin_query();
        self.sort_of(t)
    }

    fn sort_of(&mut self, t: &Term) -> KResult<Sort> {
        let ty = self.infer_term(t)?;
        match self.reduce_head(&ty, true)? {
            Term::Sort(s) => Ok(s),
            _ => Err(KernelError::SortError { term: t.clone(), ty: self.display_form(&ty) }),
        }
    }

    fn check_against(&mut self, t: &Term, expected: &Term) -> KResult<()> {
        let actual = self.infer_term(t)?;
        if self.conv(&actual, expected)? {
            Ok(())
        } else {
            Err(KernelError::TypeMismatch {
                term: t.clone(),
                expected: self.display_form(expected),
                actual: self.display_form(&actual),
            })
        }
    }

    /// δβ-normal form for error messages; falls back to the term itself.
    fn display_form(&mut self, t: &Term) -> Term {
        let saved = self.fuel;
        self.fuel = Some(10_000);
        let out = self.nf(t).unwrap_or_else(|_| t.clone());
        self.fuel = saved;
        out
    }

    fn under_binder<T>(
        &mut self,
        hint: &Name,
        ann: &Term,
        body: &Term,
        f: impl FnOnce(&mut Self, &Name, &Term) -> KResult<T>,
    ) -> KResult<T> {
        let saved = self.ctx.len();
        let y = self.push_fresh(hint, ann.clone());
        let opened = body.open(&Term::Var(y.clone()));
        let out = f(self, &y, &opened);
        self.truncate_context(saved);
        out
    }

    fn infer_term(&mut self, t: &Term) -> KResult<Term> {
        match t {
            Term::Sort(Sort::Star) => Ok(Term::boxed()),
            Term::Sort(Sort::Box) => Err(KernelError::Untypable { term: t.clone() }),
            Term::Var(x) => {
                self.ctx.lookup(x).cloned().ok_or_else(|| KernelError::UnboundIdentifier(x.clone()))
            }
            Term::Bound(i) => Err(KernelError::LooseIndex(*i)),
            Term::Const(c, args) => {
                let entry = self.env.get(c).ok_or_else(|| KernelError::UnboundIdentifier(c.clone()))?;
                if entry.params.len() != args.len() {
                    return Err(KernelError::ArityMismatch {
                        constant: c.clone(),
                        expected: entry.params.len(),
                        found: args.len(),
                    });
                }
                let mut binding = HashMap::new();
                for ((x, ty), arg) in entry.params.iter().zip(args) {
                    let expected = ty.subst_many(&binding);
                    self.check_against(arg, &expected)?;
                    binding.insert(x.clone(), arg.clone());
                }
                Ok(entry.ty.subst_many(&binding))
            }
            Term::Pi(x, a, b) => {
                self.sort_of(a)?;
                let s2 = self.under_binder(x, a, b, |k, _, body| k.sort_of(body))?;
                Ok(Term::Sort(s2))
            }
            Term::Lam(x, a, b) => {
                self.sort_of(a)?;
                let body_ty = self.under_binder(x, a, b, |k, y, body| {
                    let ty = k.infer_term(body)?;
                    // the product Πx:A.B must itself be well formed
                    if ty.as_sort() != Some(Sort::Box) {
                        k.sort_of(&ty)?;
                    } else {
                        return Err(KernelError::Untypable { term: ty });
                    }
                    Ok(ty.abstract_var(y))
                })?;
                Ok(Term::Pi(x.clone(), a.clone(), Arc::new(body_ty)))
            }
            Term::App(f, a) => {
                let fty = self.infer_term(f)?;
                match self.reduce_head(&fty, true)? {
                    Term::Pi(_, dom, cod) => {
                        self.check_against(a, &dom)?;
                        Ok(cod.open(a))
                    }
                    _ => Err(KernelError::NotAFunction { term: (**f).clone(), ty: self.display_form(&fty) }),
                }
            }
        }
    }
}
