//! Shared test support: corpus access, an independent named-term oracle and
//! random generators for environments, terms and books.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use automath::book::Book;
use automath::kernel::{DefEntry, Definiens, Env, KernelConfig};
use automath::syntax::Dialect;
use automath::term::{Name, Sort, Telescope, Term};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub mod suites;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn check(text: &str) -> Book {
    Book::check_text(text, Dialect::Original, KernelConfig::default()).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn check_file(name: &str) -> Book {
    check(&corpus(name))
}

// ---------------------------------------------------------------------------
// Named oracle terms

/// A term with named binders, independent of the library's representation.
#[derive(Clone, Debug)]
pub enum N {
    Star,
    Boxed,
    Var(String),
    Const(String, Vec<N>),
    Lam(String, Box<N>, Box<N>),
    Pi(String, Box<N>, Box<N>),
    App(Box<N>, Box<N>),
}

pub struct Supply(usize);

impl Supply {
    pub fn new() -> Supply {
        Supply(0)
    }

    pub fn fresh(&mut self) -> String {
        self.0 += 1;
        format!("v%{}", self.0)
    }
}

/// Converts a library term, giving every binder a fresh name.
pub fn to_named(t: &Term, supply: &mut Supply) -> N {
    fn go(t: &Term, names: &mut Vec<String>, supply: &mut Supply) -> N {
        match t {
            Term::Sort(Sort::Star) => N::Star,
            Term::Sort(Sort::Box) => N::Boxed,
            Term::Var(x) => N::Var(x.to_string()),
            Term::Bound(i) => N::Var(names[names.len() - 1 - i].clone()),
            Term::Const(c, args) => N::Const(c.to_string(), args.iter().map(|a| go(a, names, supply)).collect()),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                let na = go(a, names, supply);
                let x = supply.fresh();
                names.push(x.clone());
                let nb = go(b, names, supply);
                names.pop();
                if matches!(t, Term::Lam(..)) {
                    N::Lam(x, Box::new(na), Box::new(nb))
                } else {
                    N::Pi(x, Box::new(na), Box::new(nb))
                }
            }
            Term::App(f, a) => N::App(Box::new(go(f, names, supply)), Box::new(go(a, names, supply))),
        }
    }
    go(t, &mut Vec::new(), supply)
}

pub fn from_named(n: &N) -> Term {
    match n {
        N::Star => Term::star(),
        N::Boxed => Term::boxed(),
        N::Var(x) => Term::var(x.as_str()),
        N::Const(c, args) => Term::cnst(c.as_str(), args.iter().map(from_named).collect()),
        N::Lam(x, a, b) => Term::lam(x.as_str(), from_named(a), from_named(b)),
        N::Pi(x, a, b) => Term::pi(x.as_str(), from_named(a), from_named(b)),
        N::App(f, a) => Term::app(from_named(f), from_named(a)),
    }
}

pub fn free_vars_n(n: &N) -> HashSet<String> {
    fn go(n: &N, bound: &mut Vec<String>, out: &mut HashSet<String>) {
        match n {
            N::Star | N::Boxed => {}
            N::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            N::Const(_, args) => args.iter().for_each(|a| go(a, bound, out)),
            N::Lam(x, a, b) | N::Pi(x, a, b) => {
                go(a, bound, out);
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            N::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
        }
    }
    let mut out = HashSet::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

/// Capture-avoiding simultaneous substitution, renaming binders on clash.
pub fn subst_n(n: &N, map: &HashMap<String, N>, supply: &mut Supply) -> N {
    match n {
        N::Star | N::Boxed => n.clone(),
        N::Var(x) => map.get(x).cloned().unwrap_or_else(|| n.clone()),
        N::Const(c, args) => N::Const(c.clone(), args.iter().map(|a| subst_n(a, map, supply)).collect()),
        N::Lam(x, a, b) | N::Pi(x, a, b) => {
            let na = subst_n(a, map, supply);
            let mut inner: HashMap<String, N> = map.clone();
            inner.remove(x);
            let clash = inner.values().any(|v| free_vars_n(v).contains(x));
            let (y, nb) = if clash {
                let y = supply.fresh();
                inner.insert(x.clone(), N::Var(y.clone()));
                (y, subst_n(b, &inner, supply))
            } else {
                (x.clone(), subst_n(b, &inner, supply))
            };
            if matches!(n, N::Lam(..)) {
                N::Lam(y, Box::new(na), Box::new(nb))
            } else {
                N::Pi(y, Box::new(na), Box::new(nb))
            }
        }
        N::App(f, a) => N::App(Box::new(subst_n(f, map, supply)), Box::new(subst_n(a, map, supply))),
    }
}

pub fn subst1(n: &N, x: &str, v: &N, supply: &mut Supply) -> N {
    subst_n(n, &HashMap::from([(x.to_string(), v.clone())]), supply)
}

/// α-equivalence by simultaneous walk with binder correspondences.
pub fn alpha_n(a: &N, b: &N) -> bool {
    fn go(a: &N, b: &N, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (N::Star, N::Star) | (N::Boxed, N::Boxed) => true,
            (N::Var(x), N::Var(y)) => {
                for (l, r) in env.iter().rev() {
                    if l == x || r == y {
                        return l == x && r == y;
                    }
                }
                x == y
            }
            (N::Const(c, xs), N::Const(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, env))
            }
            (N::Lam(x, a1, b1), N::Lam(y, a2, b2)) | (N::Pi(x, a1, b1), N::Pi(y, a2, b2)) => {
                if !go(a1, a2, env) {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            (N::App(f1, x1), N::App(f2, x2)) => go(f1, f2, env) && go(x1, x2, env),
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Unfolds `c(args)` using the entry's body, or `None` for a primitive.
pub fn unfold_n(env: &Env, c: &str, args: &[N], supply: &mut Supply) -> Option<N> {
    let entry = env.get(c)?;
    let body = entry.body_term()?;
    let body = to_named(body, supply);
    let map: HashMap<String, N> =
        entry.params.names().map(|x| x.to_string()).zip(args.iter().cloned()).collect();
    Some(subst_n(&body, &map, supply))
}

/// Full βδ-normal form, leftmost-outermost.
pub fn nf_n(env: &Env, n: &N, supply: &mut Supply) -> N {
    match n {
        N::Star | N::Boxed | N::Var(_) => n.clone(),
        N::Const(c, args) => match unfold_n(env, c, args, supply) {
            Some(u) => nf_n(env, &u, supply),
            None => N::Const(c.clone(), args.iter().map(|a| nf_n(env, a, supply)).collect()),
        },
        N::Lam(x, a, b) => N::Lam(x.clone(), Box::new(nf_n(env, a, supply)), Box::new(nf_n(env, b, supply))),
        N::Pi(x, a, b) => N::Pi(x.clone(), Box::new(nf_n(env, a, supply)), Box::new(nf_n(env, b, supply))),
        N::App(f, a) => {
            let f = nf_n(env, f, supply);
            match f {
                N::Lam(x, _, body) | N::Pi(x, _, body) => {
                    let r = subst1(&body, &x, a, supply);
                    nf_n(env, &r, supply)
                }
                f => N::App(Box::new(f), Box::new(nf_n(env, a, supply))),
            }
        }
    }
}

/// Positions of all β and δ redexes, in preorder.
fn redexes(env: &Env, n: &N, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    match n {
        N::Star | N::Boxed | N::Var(_) => {}
        N::Const(c, args) => {
            if env.get(c.as_str()).is_some_and(|e| !e.is_primitive()) {
                out.push(path.clone());
            }
            for (i, a) in args.iter().enumerate() {
                path.push(i);
                redexes(env, a, path, out);
                path.pop();
            }
        }
        N::Lam(_, a, b) | N::Pi(_, a, b) => {
            path.push(0);
            redexes(env, a, path, out);
            path.pop();
            path.push(1);
            redexes(env, b, path, out);
            path.pop();
        }
        N::App(f, a) => {
            if matches!(**f, N::Lam(..) | N::Pi(..)) {
                out.push(path.clone());
            }
            path.push(0);
            redexes(env, f, path, out);
            path.pop();
            path.push(1);
            redexes(env, a, path, out);
            path.pop();
        }
    }
}

fn contract_at(env: &Env, n: &N, path: &[usize], supply: &mut Supply) -> N {
    let Some((&i, rest)) = path.split_first() else {
        return match n {
            N::Const(c, args) => unfold_n(env, c, args, supply).expect("δ-redex"),
            N::App(f, a) => match &**f {
                N::Lam(x, _, body) | N::Pi(x, _, body) => subst1(body, x, a, supply),
                _ => unreachable!("β-redex"),
            },
            _ => unreachable!("redex"),
        };
    };
    match n {
        N::Const(c, args) => {
            let mut args = args.clone();
            args[i] = contract_at(env, &args[i], rest, supply);
            N::Const(c.clone(), args)
        }
        N::Lam(x, a, b) | N::Pi(x, a, b) => {
            let (a, b) = if i == 0 {
                (contract_at(env, a, rest, supply), (**b).clone())
            } else {
                ((**a).clone(), contract_at(env, b, rest, supply))
            };
            if matches!(n, N::Lam(..)) {
                N::Lam(x.clone(), Box::new(a), Box::new(b))
            } else {
                N::Pi(x.clone(), Box::new(a), Box::new(b))
            }
        }
        N::App(f, a) => {
            if i == 0 {
                N::App(Box::new(contract_at(env, f, rest, supply)), a.clone())
            } else {
                N::App(f.clone(), Box::new(contract_at(env, a, rest, supply)))
            }
        }
        _ => unreachable!("path into a leaf"),
    }
}

/// Contracts one randomly chosen redex; `None` when in normal form.
pub fn step_random(env: &Env, n: &N, rng: &mut StdRng, supply: &mut Supply) -> Option<N> {
    let mut all = Vec::new();
    redexes(env, n, &mut Vec::new(), &mut all);
    let path = all.choose(rng)?;
    Some(contract_at(env, n, path, supply))
}

/// Normal form reached by contracting random redexes until none is left.
pub fn nf_random(env: &Env, n: &N, rng: &mut StdRng, supply: &mut Supply) -> N {
    let mut cur = n.clone();
    for _ in 0..100_000 {
        match step_random(env, &cur, rng, supply) {
            Some(next) => cur = next,
            None => return cur,
        }
    }
    panic!("random reduction did not terminate");
}

pub fn oracle_nf(env: &Env, t: &Term) -> N {
    let mut s = Supply::new();
    let n = to_named(t, &mut s);
    nf_n(env, &n, &mut s)
}

pub fn oracle_convertible(env: &Env, a: &Term, b: &Term) -> bool {
    alpha_n(&oracle_nf(env, a), &oracle_nf(env, b))
}

// ---------------------------------------------------------------------------
// Random simply typed environments and terms

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ty {
    Atom(usize),
    Arr(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arr(a: Ty, b: Ty) -> Ty {
        Ty::Arr(Box::new(a), Box::new(b))
    }

    fn result_after(&self, n: usize) -> Option<&Ty> {
        let mut t = self;
        for _ in 0..n {
            match t {
                Ty::Arr(_, b) => t = b,
                Ty::Atom(_) => return None,
            }
        }
        Some(t)
    }
}

/// A small environment of atoms `o_i`, type aliases, primitive and defined
/// constants, plus parameterised definitions, with the simple type of each.
pub struct RandomEnv {
    pub env: Env,
    pub atoms: usize,
    pub aliases: Vec<(String, Ty)>,
    /// Constants without parameters and their types.
    pub consts: Vec<(String, Ty)>,
    /// One-parameter definitions `h(x:param) : result`.
    pub unary: Vec<(String, Ty, Ty)>,
}

pub struct Gen<'a> {
    pub re: &'a RandomEnv,
    pub rng: &'a mut StdRng,
    counter: usize,
}

impl RandomEnv {
    pub fn generate(rng: &mut StdRng) -> RandomEnv {
        let atoms = rng.gen_range(1..=3);
        let mut re = RandomEnv { env: Env::new(), atoms, aliases: Vec::new(), consts: Vec::new(), unary: Vec::new() };
        for i in 0..atoms {
            re.push(format!("o{i}"), Telescope::new(), Definiens::Primitive, Term::star());
        }
        for i in 0..atoms {
            re.push(format!("a{i}"), Telescope::new(), Definiens::Primitive, re.atom(i));
            re.consts.push((format!("a{i}"), Ty::Atom(i)));
        }
        for j in 0..rng.gen_range(0..=2) {
            let ty = re.random_ty(rng, 2);
            let name = format!("T{j}");
            let body = re.render_plain(&ty);
            re.push(name.clone(), Telescope::new(), Definiens::Term(body), Term::star());
            re.aliases.push((name, ty));
        }
        for j in 0..rng.gen_range(1..=3) {
            let ty = re.random_ty(rng, 2);
            let name = format!("f{j}");
            let rendered = re.render(&ty, rng);
            re.push(name.clone(), Telescope::new(), Definiens::Primitive, rendered);
            re.consts.push((name, ty));
        }
        for j in 0..rng.gen_range(1..=3) {
            let ty = re.random_ty(rng, 2);
            let name = format!("g{j}");
            let body = Gen::new(&re, rng).term(&ty, &[], 3);
            let rendered = re.render(&ty, rng);
            re.push(name.clone(), Telescope::new(), Definiens::Term(body), rendered);
            re.consts.push((name, ty));
        }
        for j in 0..rng.gen_range(0..=2) {
            let param = Ty::Atom(rng.gen_range(0..atoms));
            let result = re.random_ty(rng, 1);
            let name = format!("h{j}");
            let x = format!("p{j}");
            let body = Gen::new(&re, rng).term(&result, &[(x.clone(), param.clone())], 3);
            let params: Telescope = [(Name::new(&x), re.render_plain(&param))].into_iter().collect();
            let rendered = re.render(&result, rng);
            re.push(name.clone(), params, Definiens::Term(body), rendered);
            re.unary.push((name, param, result));
        }
        re.env.check_legal(KernelConfig::default()).expect("generated environment is legal");
        re
    }

    fn push(&mut self, name: String, params: Telescope, body: Definiens, ty: Term) {
        self.env.push(DefEntry { name: Name::new(name), params, body, ty }).unwrap();
    }

    pub fn atom(&self, i: usize) -> Term {
        Term::cnst(format!("o{i}"), vec![])
    }

    pub fn random_ty(&self, rng: &mut StdRng, depth: usize) -> Ty {
        if depth == 0 || rng.gen_bool(0.5) {
            Ty::Atom(rng.gen_range(0..self.atoms))
        } else {
            Ty::arr(self.random_ty(rng, depth - 1), self.random_ty(rng, depth - 1))
        }
    }

    pub fn render_plain(&self, ty: &Ty) -> Term {
        match ty {
            Ty::Atom(i) => self.atom(*i),
            Ty::Arr(a, b) => Term::arrow(self.render_plain(a), self.render_plain(b)),
        }
    }

    /// Renders a type, sometimes through an alias that must be unfolded.
    pub fn render(&self, ty: &Ty, rng: &mut StdRng) -> Term {
        if let Some((name, _)) = self.aliases.iter().find(|(_, t)| t == ty) {
            if rng.gen_bool(0.5) {
                return Term::cnst(name.as_str(), vec![]);
            }
        }
        match ty {
            Ty::Atom(i) => self.atom(*i),
            Ty::Arr(a, b) => Term::arrow(self.render(a, rng), self.render(b, rng)),
        }
    }
}

impl<'a> Gen<'a> {
    pub fn new(re: &'a RandomEnv, rng: &'a mut StdRng) -> Gen<'a> {
        Gen { re, rng, counter: 0 }
    }

    fn fresh(&mut self) -> String {
        self.counter += 1;
        format!("x{}", self.counter)
    }

    /// Heads (variables or constants) whose type, after `k` arguments, is `ty`.
    fn heads(&self, ty: &Ty, ctx: &[(String, Ty)]) -> Vec<(Term, Vec<Ty>)> {
        let mut out = Vec::new();
        let candidates = ctx
            .iter()
            .map(|(x, t)| (Term::var(x.as_str()), t))
            .chain(self.re.consts.iter().map(|(c, t)| (Term::cnst(c.as_str(), vec![]), t)));
        for (head, hty) in candidates {
            let mut args = Vec::new();
            let mut t = hty;
            loop {
                if t == ty {
                    out.push((head.clone(), args.clone()));
                }
                match t {
                    Ty::Arr(a, b) => {
                        args.push((**a).clone());
                        t = b;
                    }
                    Ty::Atom(_) => break,
                }
            }
        }
        out
    }

    /// A term of type `ty` in context `ctx`.
    pub fn term(&mut self, ty: &Ty, ctx: &[(String, Ty)], fuel: usize) -> Term {
        let heads = self.heads(ty, ctx);
        if fuel == 0 {
            if let Ty::Arr(a, b) = ty {
                if heads.iter().all(|(_, args)| !args.is_empty()) || self.rng.gen_bool(0.3) {
                    return self.lambda(a, b, ctx, 0);
                }
            }
            let zero: Vec<_> = heads.iter().filter(|(_, args)| args.is_empty()).collect();
            if let Some((h, _)) = zero.choose(self.rng) {
                return h.clone();
            }
            match ty {
                Ty::Arr(a, b) => return self.lambda(a, b, ctx, 0),
                Ty::Atom(i) => return Term::cnst(format!("a{i}"), vec![]),
            }
        }
        match self.rng.gen_range(0..10) {
            0..=1 if matches!(ty, Ty::Arr(..)) => {
                let Ty::Arr(a, b) = ty else { unreachable!() };
                self.lambda(a, b, ctx, fuel - 1)
            }
            2..=4 if !heads.is_empty() => {
                let (h, args) = heads.choose(self.rng).unwrap().clone();
                args.iter().fold(h, |f, a| {
                    let arg = self.term(a, ctx, fuel - 1);
                    Term::app(f, arg)
                })
            }
            5 => {
                // β-redex (λy:A. M) N
                let a = self.re.random_ty(self.rng, 1);
                let y = self.fresh();
                let mut inner = ctx.to_vec();
                inner.push((y.clone(), a.clone()));
                let body = self.term(ty, &inner, fuel - 1);
                let arg = self.term(&a, ctx, fuel - 1);
                let ann = self.re.render(&a, self.rng);
                Term::app(Term::lam(y.as_str(), ann, body), arg)
            }
            6 => {
                let unary: Vec<_> = self.re.unary.iter().filter(|(_, _, r)| r == ty).cloned().collect();
                match unary.choose(self.rng) {
                    Some((h, p, _)) => {
                        let arg = self.term(p, ctx, fuel - 1);
                        Term::cnst(h.as_str(), vec![arg])
                    }
                    None => self.term(ty, ctx, fuel - 1),
                }
            }
            _ => self.term(ty, ctx, fuel - 1),
        }
    }

    fn lambda(&mut self, a: &Ty, b: &Ty, ctx: &[(String, Ty)], fuel: usize) -> Term {
        let x = self.fresh();
        let mut inner = ctx.to_vec();
        inner.push((x.clone(), a.clone()));
        let body = self.term(b, &inner, fuel);
        let ann = self.re.render(a, self.rng);
        Term::lam(x.as_str(), ann, body)
    }

    /// A term of type `ty` with at most `max_size` nodes.
    pub fn small_term(&mut self, ty: &Ty, max_size: usize) -> Term {
        // favour sizes spread over the whole range rather than tiny terms
        let want = self.rng.gen_range(1..=max_size);
        loop {
            let fuel = self.rng.gen_range(2..=9);
            let t = self.term(ty, &[], fuel);
            let n = t.size();
            if n <= max_size && (n >= want.min(12) || self.rng.gen_bool(0.05)) {
                return t;
            }
        }
    }
}

/// `t` after a few random oracle reduction steps; convertible to `t`.
pub fn reduce_some(env: &Env, t: &Term, rng: &mut StdRng) -> Term {
    let mut s = Supply::new();
    let mut n = to_named(t, &mut s);
    for _ in 0..rng.gen_range(1..=4) {
        match step_random(env, &n, rng, &mut s) {
            Some(next) => n = next,
            None => break,
        }
    }
    from_named(&n)
}

// ---------------------------------------------------------------------------
// Random ok books

struct BookGen {
    lines: Vec<String>,
    /// Assumption lines: identifier, indicator, whether the category is `PROP`.
    assumptions: Vec<(String, Option<String>, bool)>,
    /// Definition/primitive constants: identifier, indicator, whether it is a proposition.
    constants: Vec<(String, Option<String>, bool)>,
}

impl BookGen {
    fn chain(&self, z: Option<&str>) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = z.map(str::to_string);
        while let Some(name) = cur {
            let i = self.assumptions.iter().position(|(x, _, _)| *x == name).unwrap();
            out.push(i);
            cur = self.assumptions[i].1.clone();
        }
        out.reverse();
        out
    }
}

/// A random ok book of at most `max_lines` lines, in the original dialect.
/// Lines use parameter completion, abstraction, application and primitives.
pub fn random_book(rng: &mut StdRng, max_lines: usize) -> String {
    let mut g = BookGen { lines: Vec::new(), assumptions: Vec::new(), constants: Vec::new() };
    let n = rng.gen_range(1..=max_lines);
    for k in 0..n {
        let indicator: Option<String> = if g.assumptions.is_empty() || rng.gen_bool(0.2) {
            None
        } else {
            Some(g.assumptions.choose(rng).unwrap().0.clone())
        };
        let chain = g.chain(indicator.as_deref());
        let props: Vec<&str> =
            chain.iter().filter(|&&i| g.assumptions[i].2).map(|&i| g.assumptions[i].0.as_str()).collect();
        let proofs: Vec<(&str, usize)> = chain
            .iter()
            .filter(|&&i| !g.assumptions[i].2)
            .map(|&i| (g.assumptions[i].0.as_str(), i))
            .collect();
        // constants usable here with all parameters completed
        let usable: Vec<(String, bool)> = g
            .constants
            .iter()
            .filter(|(_, z, _)| g.chain(z.as_deref()).iter().all(|i| chain.contains(i)))
            .map(|(c, _, p)| (c.clone(), *p))
            .collect();
        let usable_props: Vec<&str> = usable.iter().filter(|(_, p)| *p).map(|(c, _)| c.as_str()).collect();
        let prefix = match &indicator {
            Some(z) => format!("{z} * "),
            None => "* ".to_string(),
        };
        let id = format!("l{k}");
        let ind = indicator.clone();
        let choice = rng.gen_range(0..6);
        match choice {
            0 | 1 => {
                // assumption of a proposition, or a proof of one in scope
                let category = match props.choose(rng) {
                    Some(p) if rng.gen_bool(0.6) => p.to_string(),
                    _ => "PROP".to_string(),
                };
                let is_prop = category == "PROP";
                g.lines.push(format!("{prefix}{id} := --- ; {category}"));
                g.assumptions.push((id, ind, is_prop));
            }
            2 if props.len() >= 2 || !usable_props.is_empty() => {
                // implication-like definition [x,A]B
                let mut pool: Vec<&str> = props.clone();
                pool.extend(usable_props.iter().copied());
                let a = pool.choose(rng).unwrap();
                let b = pool.choose(rng).unwrap();
                g.lines.push(format!("{prefix}{id} := [x,{a}]{b} ; PROP"));
                g.constants.push((id, ind, true));
            }
            3 if !proofs.is_empty() => {
                // identity-like proof: [h,A]h : [h,A]A, for a proposition A in scope
                let (pf, i) = proofs.choose(rng).unwrap();
                let a = g.lines_category(*i);
                if rng.gen_bool(0.5) {
                    g.lines.push(format!("{prefix}{id} := [h,{a}]h ; [h,{a}]{a}"));
                } else {
                    g.lines.push(format!("{prefix}{id} := {pf} ; {a}"));
                }
                g.constants.push((id, ind, false));
            }
            4 => {
                g.lines.push(format!("{prefix}{id} := PN ; PROP"));
                g.constants.push((id, ind, true));
            }
            _ if !usable_props.is_empty() => {
                // a definition reusing an earlier proposition constant by name only
                let c = usable_props.choose(rng).unwrap();
                g.lines.push(format!("{prefix}{id} := {c} ; PROP"));
                g.constants.push((id, ind, true));
            }
            _ => {
                g.lines.push(format!("{prefix}{id} := --- ; PROP"));
                g.assumptions.push((id, ind, true));
            }
        }
    }
    g.lines.join("\n") + "\n"
}

impl BookGen {
    fn lines_category(&self, assumption: usize) -> String {
        let id = &self.assumptions[assumption].0;
        let line = self.lines.iter().find(|l| l.contains(&format!("* {id} := ---"))).unwrap();
        line.rsplit("; ").next().unwrap().to_string()
    }
}
