//! Randomised checks shared by the focused test files and the acceptance run.
//! Each returns the number of cases it examined, or a description of the
//! first counterexample.

use std::collections::BTreeSet;

use automath::book::{Book, Line, LineKind};
use automath::clean::{clean_book, dead_ends, is_clean};
use automath::kernel::{convertible, infer_type, normalize, DeltaStrategy, KernelConfig};
use automath::syntax::Dialect;
use automath::term::{Telescope, Term};
use automath::translate::{book_of_env, env_of_book, roundtrip_check};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use super::*;

/// Lazy conversion against full normalisation, on `envs × per_env` pairs of
/// well-typed terms of at most 25 nodes.
pub fn conversion_oracle(seed: u64, envs: usize, per_env: usize) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let eager = KernelConfig { delta_strategy: DeltaStrategy::Eager, ..KernelConfig::default() };
    let mut cases = 0;
    let mut agreeing_true = 0;
    for _ in 0..envs {
        let re = RandomEnv::generate(&mut rng);
        let env = &re.env;
        for _ in 0..per_env {
            let ty = re.random_ty(&mut rng, 2);
            let mut pair_rng = StdRng::seed_from_u64(rng.gen());
            let t1 = Gen::new(&re, &mut pair_rng).small_term(&ty, 25);
            let t2 = match rng.gen_range(0..3) {
                0 => Gen::new(&re, &mut pair_rng).small_term(&ty, 25),
                _ => reduce_some(env, &t1, &mut rng),
            };
            let rendered = re.render_plain(&ty);
            for t in [&t1, &t2] {
                let inferred = infer_type(env, &Telescope::new(), t).map_err(|e| format!("{t:?}: {e}"))?;
                if !convertible(env, KernelConfig::default(), &inferred, &rendered).unwrap() {
                    return Err(format!("{t} does not have type {rendered}"));
                }
            }
            let want = oracle_convertible(env, &t1, &t2);
            let lazy = convertible(env, KernelConfig::default(), &t1, &t2).map_err(|e| e.to_string())?;
            let eager_r = convertible(env, eager, &t1, &t2).map_err(|e| e.to_string())?;
            if lazy != want || eager_r != want {
                return Err(format!("{t1} vs {t2}: lazy {lazy}, eager {eager_r}, oracle {want}"));
            }
            agreeing_true += want as usize;
            cases += 1;
        }
    }
    if agreeing_true * 10 < cases {
        return Err(format!("only {agreeing_true} of {cases} pairs were convertible"));
    }
    Ok(cases)
}

/// Library normal forms against the oracle, and oracle normal forms under
/// random redex orders against each other.
pub fn confluence(seed: u64, envs: usize, per_env: usize, orders: usize) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cases = 0;
    for _ in 0..envs {
        let re = RandomEnv::generate(&mut rng);
        let env = &re.env;
        for _ in 0..per_env {
            let ty = re.random_ty(&mut rng, 2);
            let mut trng = StdRng::seed_from_u64(rng.gen());
            let t = Gen::new(&re, &mut trng).small_term(&ty, 25);
            let reference = oracle_nf(env, &t);
            let lib = normalize(env, KernelConfig::default(), &t).map_err(|e| e.to_string())?;
            let mut s = Supply::new();
            if !alpha_n(&to_named(&lib, &mut s), &reference) {
                return Err(format!("normalize({t}) = {lib}"));
            }
            for _ in 0..orders {
                let mut s = Supply::new();
                let n = to_named(&t, &mut s);
                let got = nf_random(env, &n, &mut rng, &mut s);
                if !alpha_n(&got, &reference) {
                    return Err(format!("{t}: random order reached {}", from_named(&got)));
                }
            }
            cases += 1;
        }
    }
    Ok(cases)
}

/// Identifiers left after removing dead ends one at a time in random order.
fn clean_single_steps(lines: &[Line], rng: &mut StdRng) -> Vec<String> {
    let mut cur: Vec<&Line> = lines.iter().collect();
    loop {
        let dead: Vec<usize> = (0..cur.len())
            .filter(|&i| {
                cur[i].kind() == LineKind::Assumption
                    && !cur[i + 1..].iter().any(|l| l.indicator.as_ref() == Some(&cur[i].identifier))
            })
            .collect();
        match dead.choose(rng) {
            Some(&i) => {
                cur.remove(i);
            }
            None => return cur.iter().map(|l| l.identifier.to_string()).collect(),
        }
    }
}

/// Order independence, idempotence and ok-preservation of `cl` on random books.
pub fn clean_properties(seed: u64, books: usize, orders: usize) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..books {
        let text = random_book(&mut rng, 40);
        let b = Book::check_text(&text, Dialect::Original, KernelConfig::default())
            .map_err(|e| format!("generator produced a bad book: {e}\n{text}"))?;
        if !b.check_coherent().is_coherent() {
            return Err(format!("incoherent book\n{text}"));
        }
        let report = clean_book(&b);
        let ids: Vec<String> = report.result.lines().iter().map(|l| l.identifier.to_string()).collect();
        for _ in 0..orders {
            let other = clean_single_steps(b.lines(), &mut rng);
            if other != ids {
                return Err(format!("removal orders disagree: {ids:?} vs {other:?}\n{text}"));
            }
        }
        if !dead_ends(&report.result).is_empty() || !clean_book(&report.result).removed.is_empty() {
            return Err(format!("cl is not idempotent\n{text}"));
        }
        let removed: BTreeSet<usize> = report.removed.iter().map(|(i, _, _)| *i).collect();
        let kept: Vec<&Line> =
            b.lines().iter().enumerate().filter(|(i, _)| !removed.contains(i)).map(|(_, l)| l).collect();
        if kept.len() != report.result.len() || kept.iter().zip(report.result.lines()).any(|(a, b)| *a != b) {
            return Err(format!("cl(B) is not a sub-book of B\n{text}"));
        }
        // re-check from scratch
        let fresh = Book::from_lines(report.result.lines().to_vec(), KernelConfig::default())
            .map_err(|e| format!("cl(B) does not re-check: {e}\n{text}"))?;
        if !fresh.is_ok() || fresh.env().len() != b.env().len() {
            return Err(format!("cl(B) changed the environment\n{text}"));
        }
    }
    Ok(books)
}

/// The book/environment correspondence on cleaned random books.
pub fn roundtrips(seed: u64, books: usize) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..books {
        let text = random_book(&mut rng, 40);
        let b = Book::check_text(&text, Dialect::Original, KernelConfig::default()).map_err(|e| e.to_string())?;
        let clean = clean_book(&b).result;
        roundtrip_check(&clean).map_err(|e| format!("{e}\n{text}"))?;
        let env = env_of_book(&clean).map_err(|e| e.to_string())?;
        let back = book_of_env(&env).map_err(|e| e.to_string())?;
        let assumptions = back.lines().iter().filter(|l| l.kind() == LineKind::Assumption).count();
        let params: usize = env.iter().map(|e| e.params.len()).sum();
        if assumptions != params || !is_clean(&back) || !back.check_coherent().is_coherent() {
            return Err(format!("B_Δ shares or keeps dead ends\n{text}"));
        }
    }
    Ok(books)
}

/// Pairs `λx:A. F x` and `F` for a neutral `F : A → A`.
pub fn eta_pair() -> (automath::kernel::Env, Term, Term) {
    let env = check("* A := --- ; PROP\nA * F := --- ; [x,A]A\n").env().clone();
    let f = Term::var("F");
    let expanded = Term::lam("x", Term::var("A"), Term::app(f.clone(), Term::var("x")));
    (env, expanded, f)
}
