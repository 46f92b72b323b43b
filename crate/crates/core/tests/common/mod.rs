//! Random small systems and terms shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padp_core::adp::{Adp, AdpId};
use padp_core::poly::Poly;
use padp_core::processors::Interpretation;
use padp_core::ptrs::{ProbRule, Ptrs};
use padp_core::term::{Term, Var};
use padp_core::{rat, Rational};

pub const DEFINED: [(&str, usize); 2] = [("f", 1), ("g", 2)];
pub const CONSTRUCTORS: [(&str, usize); 3] = [("0", 0), ("s", 1), ("c", 2)];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A constructor term of height at most `h` over `vars`.
pub fn constructor_term(rng: &mut impl Rng, h: usize, vars: &[&str]) -> Term {
    if h == 0 || rng.gen_bool(0.35) {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return Term::var(vars.choose(rng).unwrap());
        }
        return Term::constant("0");
    }
    let &(c, k) = CONSTRUCTORS.choose(rng).unwrap();
    Term::fun(c, (0..k).map(|_| constructor_term(rng, h - 1, vars)).collect())
}

/// Any term of height at most `h`.
pub fn any_term(rng: &mut impl Rng, h: usize, vars: &[&str]) -> Term {
    if h == 0 || rng.gen_bool(0.3) {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return Term::var(vars.choose(rng).unwrap());
        }
        return Term::constant("0");
    }
    let all: Vec<(&str, usize)> = DEFINED.iter().chain(CONSTRUCTORS.iter()).copied().collect();
    let &(f, k) = all.choose(rng).unwrap();
    Term::fun(f, (0..k).map(|_| any_term(rng, h - 1, vars)).collect())
}

pub fn ground_constructor(rng: &mut impl Rng, h: usize) -> Term {
    constructor_term(rng, h, &[])
}

/// A basic term f(..) or g(..,..) with ground constructor arguments.
pub fn basic_term(rng: &mut impl Rng, h: usize) -> Term {
    let &(f, k) = DEFINED.choose(rng).unwrap();
    Term::fun(f, (0..k).map(|_| ground_constructor(rng, h)).collect())
}

fn distribution(rng: &mut impl Rng, max_branches: usize) -> Vec<Rational> {
    match rng.gen_range(1..=max_branches) {
        1 => vec![rat(1, 1)],
        _ => [vec![rat(1, 2), rat(1, 2)], vec![rat(1, 3), rat(2, 3)], vec![rat(3, 4), rat(1, 4)]].choose(rng).unwrap().clone(),
    }
}

/// Up to `max_rules` rules over f/1, g/2 and the constructors 0, s, c.
pub fn random_ptrs(rng: &mut impl Rng, max_rules: usize, max_branches: usize) -> Ptrs {
    let n = rng.gen_range(1..=max_rules);
    let mut rules = Vec::new();
    for _ in 0..n {
        let &(f, k) = DEFINED.choose(rng).unwrap();
        let lhs = Term::fun(f, (0..k).map(|_| constructor_term(rng, 2, &["x", "y"])).collect());
        let lv: Vec<String> = lhs.vars_ordered().iter().map(|v| v.name().to_string()).collect();
        let lv: Vec<&str> = lv.iter().map(String::as_str).collect();
        let rhs = distribution(rng, max_branches).into_iter().map(|p| (p, any_term(rng, 2, &lv))).collect();
        rules.push(ProbRule::new(lhs, rhs).expect("well-formed by construction"));
    }
    let vars: BTreeSet<Var> = ["x", "y"].iter().map(|v| Var::new(v)).collect();
    Ptrs::new(vars, rules).expect("fixed signature")
}

/// I(t) (annotations ignored) or I(t#) at the root, by direct recursion.
fn eval(i: &Interpretation, t: &Term, sharp_root: bool) -> Poly<String> {
    match t {
        Term::Var(v) => Poly::var(v.name().to_string()),
        Term::App { sym, args, .. } => {
            let args: Vec<Poly<String>> = args.iter().map(|a| eval(i, a, false)).collect();
            let mut out = Poly::zero();
            for (m, c) in &i.get(&(sym.clone(), sharp_root)).terms {
                let mut prod = Poly::constant(c.clone());
                for &(k, e) in m {
                    for _ in 0..e {
                        prod = &prod * &args[k];
                    }
                }
                out = &out + &prod;
            }
            out
        }
    }
}

/// Σ I(t#) over the annotated subterms t of r.
fn eval_sharp_sum(i: &Interpretation, r: &Term) -> Poly<String> {
    match r {
        Term::Var(_) => Poly::zero(),
        Term::App { annotated, args, .. } => {
            let mut out = if *annotated { eval(i, r, true) } else { Poly::zero() };
            for a in args {
                out = &out + &eval_sharp_sum(i, a);
            }
            out
        }
    }
}

/// The three reduction-pair conditions, checked coefficient-wise over the naturals.
pub fn check_rp_witness(adps: &[Adp], i: &Interpretation, strict: &BTreeSet<AdpId>) -> Result<(), String> {
    let nonneg = |p: &Poly<String>| p.terms.values().all(|c| *c >= rat(0, 1));
    for a in adps {
        if a.m {
            let mut rhs = Poly::zero();
            for (p, r) in &a.rhs {
                rhs = &rhs + &eval(i, &r.flat(), false).scale(p);
            }
            if !nonneg(&(&eval(i, &a.lhs, false) - &rhs)) {
                return Err(format!("rule of {} is not weakly decreasing", a.id));
            }
        }
        let mut rhs = Poly::zero();
        for (p, r) in &a.rhs {
            rhs = &rhs + &eval_sharp_sum(i, r).scale(p);
        }
        let diff = &eval(i, &a.lhs, true) - &rhs;
        if !nonneg(&diff) {
            return Err(format!("{} is not weakly decreasing", a.id));
        }
        if strict.contains(&a.id) && diff.constant_term() <= rat(0, 1) {
            return Err(format!("{} is not strictly decreasing", a.id));
        }
    }
    Ok(())
}
