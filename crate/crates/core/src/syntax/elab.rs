//! Surface expressions to core terms.
//!
//! Elaboration is untrusted: it consults the kernel to decide how to read an
//! ambiguous `[x,A]B`, and the kernel re-checks every result afterwards.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{is_sort_keyword, AbsFlavor, SurfaceExpr, WILDCARD};
use crate::kernel::{Kernel, KernelError};
use crate::term::{Name, Telescope, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElabError {
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("cannot tell whether `[{0},…]…` is a λ or a Π here; it has no expected type")]
    AmbiguityUnresolved(String),
    #[error("cannot complete the parameters of `{constant}`: `{missing}` is not in scope")]
    IncompletableParams { constant: String, missing: String },
    #[error("`{constant}` has {expected} parameter(s) but {found} were given")]
    ArityMismatch { constant: String, expected: usize, found: usize },
    #[error("`{0}` is a variable and cannot be instantiated")]
    NotAConstant(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl ElabError {
    pub fn class(&self) -> &'static str {
        match self {
            ElabError::UnboundIdentifier(_) => "UnboundIdentifier",
            ElabError::AmbiguityUnresolved(_) => "AmbiguityUnresolved",
            ElabError::IncompletableParams { .. } => "IncompletableParams",
            ElabError::ArityMismatch { .. } => "ArityMismatch",
            ElabError::NotAConstant(_) => "NotAConstant",
            ElabError::Kernel(e) => e.class(),
        }
    }
}

/// What the surrounding position expects of an expression.
#[derive(Clone, Debug)]
pub enum Expected {
    /// Nothing known, e.g. the head of an application.
    Infer,
    /// A type or kind (category position).
    AnySort,
    Type(Term),
}

/// How many ambiguous abstractions were read as Π and as λ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ElabStats {
    pub pi: usize,
    pub lam: usize,
}

impl std::ops::AddAssign for ElabStats {
    fn add_assign(&mut self, o: ElabStats) {
        self.pi += o.pi;
        self.lam += o.lam;
    }
}

/// Fills in an incomplete parameter list `c(L₁,…,Lₖ)` of a constant with
/// parameters `x₁,…,xₙ` by prepending `x₁,…,xₙ₋ₖ` as identifiers.
pub fn complete_params(
    constant: &str,
    params: &Telescope,
    args: &[SurfaceExpr],
    in_scope: impl Fn(&str) -> bool,
) -> Result<Vec<SurfaceExpr>, ElabError> {
    let n = params.len();
    let k = args.len();
    if k > n {
        return Err(ElabError::ArityMismatch { constant: constant.to_string(), expected: n, found: k });
    }
    let mut out = Vec::with_capacity(n);
    for x in params.names().take(n - k) {
        if !in_scope(x) {
            return Err(ElabError::IncompletableParams {
                constant: constant.to_string(),
                missing: x.to_string(),
            });
        }
        out.push(SurfaceExpr::ident(x));
    }
    out.extend(args.iter().cloned());
    Ok(out)
}

pub struct Elaborator<'a, 'e> {
    kernel: &'a mut Kernel<'e>,
    /// Enclosing binders, innermost last: surface name and kernel variable.
    scope: Vec<(String, Name)>,
    stats: ElabStats,
}

impl<'a, 'e> Elaborator<'a, 'e> {
    /// The kernel's context supplies the variables in scope at the top level.
    pub fn new(kernel: &'a mut Kernel<'e>) -> Elaborator<'a, 'e> {
        Elaborator { kernel, scope: Vec::new(), stats: ElabStats::default() }
    }

    pub fn stats(&self) -> ElabStats {
        self.stats
    }

    pub fn elaborate(&mut self, e: &SurfaceExpr, expected: &Expected) -> Result<Term, ElabError> {
        match e {
            SurfaceExpr::Sort(s) => Ok(sort_term(s)),
            SurfaceExpr::Ident(x) => self.identifier(x),
            SurfaceExpr::Inst { name, args } => self.instance(name, args),
            SurfaceExpr::Abs { var, ann, body, flavor } => self.abstraction(var, ann, body, *flavor, expected),
            SurfaceExpr::App { fun, arg } | SurfaceExpr::RevApp { arg, fun } => self.application(fun, arg),
        }
    }

    fn variable(&self, x: &str) -> Option<Name> {
        if x == WILDCARD {
            return None;
        }
        if let Some((_, y)) = self.scope.iter().rev().find(|(s, _)| s == x) {
            return Some(y.clone());
        }
        self.kernel.context().contains(x).then(|| Name::new(x))
    }

    fn identifier(&mut self, x: &str) -> Result<Term, ElabError> {
        if let Some(y) = self.variable(x) {
            return Ok(Term::Var(y));
        }
        if self.kernel.env().get(x).is_some() {
            return self.instance(x, &[]);
        }
        Err(ElabError::UnboundIdentifier(x.to_string()))
    }

    fn instance(&mut self, c: &str, args: &[SurfaceExpr]) -> Result<Term, ElabError> {
        if self.variable(c).is_some() {
            return Err(ElabError::NotAConstant(c.to_string()));
        }
        let env = self.kernel.env();
        let Some(entry) = env.get(c) else {
            return Err(ElabError::UnboundIdentifier(c.to_string()));
        };
        let full = complete_params(c, &entry.params, args, |x| self.variable(x).is_some())?;
        let mut binding: HashMap<Name, Term> = HashMap::new();
        let mut out = Vec::with_capacity(full.len());
        for ((x, ty), arg) in entry.params.iter().zip(&full) {
            let expected = Expected::Type(ty.subst_many(&binding));
            let t = self.elaborate(arg, &expected)?;
            binding.insert(x.clone(), t.clone());
            out.push(t);
        }
        Ok(Term::Const(entry.name.clone(), out))
    }

    fn abstraction(
        &mut self,
        var: &str,
        ann: &SurfaceExpr,
        body: &SurfaceExpr,
        flavor: AbsFlavor,
        expected: &Expected,
    ) -> Result<Term, ElabError> {
        // the codomain when `expected` is a product
        let target = match expected {
            Expected::Type(t) => match self.kernel.whnf(t)? {
                Term::Pi(_, dom, cod) => Some((dom, cod)),
                _ => None,
            },
            _ => None,
        };
        let is_lam = match flavor {
            AbsFlavor::Lambda => true,
            AbsFlavor::Pi => false,
            AbsFlavor::Ambiguous => {
                let lam = match expected {
                    Expected::Infer => return Err(ElabError::AmbiguityUnresolved(var.to_string())),
                    Expected::AnySort => false,
                    Expected::Type(_) => target.is_some(),
                };
                if lam {
                    self.stats.lam += 1;
                } else {
                    self.stats.pi += 1;
                }
                lam
            }
        };
        let ann_t = self.elaborate(ann, &Expected::AnySort)?;
        let saved = self.kernel.context().len();
        let y = self.kernel.push_fresh(var, ann_t.clone());
        self.scope.push((var.to_string(), y.clone()));
        let body_expected = if is_lam {
            match &target {
                Some((_, cod)) => Expected::Type(cod.open(&Term::Var(y.clone()))),
                None => Expected::Infer,
            }
        } else {
            Expected::AnySort
        };
        let body_t = self.elaborate(body, &body_expected);
        self.scope.pop();
        self.kernel.truncate_context(saved);
        let body_t = body_t?.abstract_var(&y);
        let hint = Name::new(var);
        Ok(if is_lam {
            Term::Lam(hint, Arc::new(ann_t), Arc::new(body_t))
        } else {
            Term::Pi(hint, Arc::new(ann_t), Arc::new(body_t))
        })
    }

    fn application(&mut self, fun: &SurfaceExpr, arg: &SurfaceExpr) -> Result<Term, ElabError> {
        let f = self.elaborate(fun, &Expected::Infer)?;
        let fty = self.kernel.infer(&f)?;
        match self.kernel.whnf(&fty)? {
            Term::Pi(_, dom, _) => {
                let a = self.elaborate(arg, &Expected::Type((*dom).clone()))?;
                Ok(Term::app(f, a))
            }
            _ => {
                let ty = self.kernel.normalize(&fty).unwrap_or(fty);
                Err(KernelError::NotAFunction { term: f, ty }.into())
            }
        }
    }
}

fn sort_term(s: &str) -> Term {
    debug_assert!(s == "*" || is_sort_keyword(s));
    match s {
        "Type" | "TYPE" => Term::boxed(),
        _ => Term::star(),
    }
}
