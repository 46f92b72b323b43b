//! Exact truncated expected derivation height, rewrite sequence trees and Monte-Carlo runs.

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ptrs::{Ptrs, Redex};
use crate::term::Term;
use crate::Rational;

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("resource limit: expansion exceeded {0} nodes")]
    ResourceLimit(usize),
}

/// Memoized evaluator of edh_d(t) = 0 if t is normal or d = 0,
/// else the maximum over redexes of 1 + Σ p_j · edh_{d-1}(t_j).
pub struct Oracle<'a> {
    ptrs: &'a Ptrs,
    memo: HashMap<(Term, usize), Rational>,
    budget: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(ptrs: &'a Ptrs) -> Self {
        Self::with_budget(ptrs, DEFAULT_NODE_BUDGET)
    }

    pub fn with_budget(ptrs: &'a Ptrs, budget: usize) -> Self {
        Oracle { ptrs, memo: HashMap::new(), budget }
    }

    pub fn edh(&mut self, t: &Term, depth: usize) -> Result<Rational, OracleError> {
        if depth == 0 {
            return Ok(Rational::zero());
        }
        let key = (t.clone(), depth);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if self.memo.len() >= self.budget {
            return Err(OracleError::ResourceLimit(self.budget));
        }
        let mut best = Rational::zero();
        for redex in self.ptrs.innermost_redexes(t) {
            let v = self.step_value(t, &redex, depth)?;
            if v > best {
                best = v;
            }
        }
        self.memo.insert(key, best.clone());
        Ok(best)
    }

    fn step_value(&mut self, t: &Term, redex: &Redex, depth: usize) -> Result<Rational, OracleError> {
        let mut v = Rational::from_integer(1.into());
        for (p, u) in self.ptrs.step(t, redex).expect("redex from enumeration") {
            v += p * self.edh(&u, depth - 1)?;
        }
        Ok(v)
    }
}

pub fn edh_oracle(t: &Term, ptrs: &Ptrs, depth: usize) -> Result<Rational, OracleError> {
    Oracle::new(ptrs).edh(t, depth)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeKind {
    Inner,
    Leaf,
    Truncated,
}

#[derive(Clone, Debug)]
pub struct RstNode {
    pub prob: Rational,
    pub term: Term,
    pub kind: NodeKind,
    pub redex: Option<Redex>,
    pub children: Vec<usize>,
}

/// A truncated rewrite sequence tree; node 0 is the root.
#[derive(Clone, Debug)]
pub struct Rst {
    pub nodes: Vec<RstNode>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RedexPolicy {
    LeftmostInnermost,
    /// Picks a redex attaining the truncated edh.
    Maximize,
}

impl Rst {
    pub fn single(t: Term) -> Self {
        Rst { nodes: vec![RstNode { prob: Rational::from_integer(1.into()), term: t, kind: NodeKind::Leaf, redex: None, children: vec![] }] }
    }

    pub fn build(t: &Term, ptrs: &Ptrs, depth: usize, policy: RedexPolicy) -> Result<Rst, OracleError> {
        let mut oracle = Oracle::new(ptrs);
        let mut rst = Rst { nodes: Vec::new() };
        rst.expand(t.clone(), Rational::from_integer(1.into()), ptrs, depth, policy, &mut oracle)?;
        Ok(rst)
    }

    fn expand(
        &mut self,
        t: Term,
        prob: Rational,
        ptrs: &Ptrs,
        depth: usize,
        policy: RedexPolicy,
        oracle: &mut Oracle,
    ) -> Result<usize, OracleError> {
        if self.nodes.len() >= oracle.budget {
            return Err(OracleError::ResourceLimit(oracle.budget));
        }
        let id = self.nodes.len();
        let redexes = ptrs.innermost_redexes(&t);
        let kind = if redexes.is_empty() {
            NodeKind::Leaf
        } else if depth == 0 {
            NodeKind::Truncated
        } else {
            NodeKind::Inner
        };
        self.nodes.push(RstNode { prob: prob.clone(), term: t.clone(), kind, redex: None, children: vec![] });
        if kind != NodeKind::Inner {
            return Ok(id);
        }
        let chosen = match policy {
            RedexPolicy::LeftmostInnermost => redexes[0].clone(),
            RedexPolicy::Maximize => {
                let mut best: Option<(Rational, Redex)> = None;
                for r in redexes {
                    let v = oracle.step_value(&t, &r, depth)?;
                    if best.as_ref().is_none_or(|(b, _)| v > *b) {
                        best = Some((v, r));
                    }
                }
                best.expect("nonempty").1
            }
        };
        let dist = ptrs.step(&t, &chosen).expect("redex from enumeration");
        self.nodes[id].redex = Some(chosen);
        for (p, u) in dist {
            let c = self.expand(u, &prob * p, ptrs, depth - 1, policy, oracle)?;
            self.nodes[id].children.push(c);
        }
        Ok(id)
    }

    /// Σ of the probabilities of inner nodes.
    pub fn edl(&self) -> Rational {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Inner).map(|n| n.prob.clone()).sum()
    }

    /// Σ of leaf and truncated-frontier probabilities; 1 for every well-formed tree.
    pub fn frontier_mass(&self) -> Rational {
        self.nodes.iter().filter(|n| n.kind != NodeKind::Inner).map(|n| n.prob.clone()).sum()
    }
}

pub fn edl_of_rst(t: &Rst) -> Rational {
    t.edl()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SamplePolicy {
    RandomRedex,
    LeftmostInnermost,
}

/// Samples one path; returns the number of steps and whether a normal form was reached.
pub fn sample_run(t: &Term, ptrs: &Ptrs, policy: SamplePolicy, max_steps: usize, rng: &mut impl Rng) -> (usize, bool) {
    let mut t = t.clone();
    for steps in 0..max_steps {
        let redexes = ptrs.innermost_redexes(&t);
        if redexes.is_empty() {
            return (steps, true);
        }
        let r = match policy {
            SamplePolicy::LeftmostInnermost => &redexes[0],
            SamplePolicy::RandomRedex => &redexes[rng.gen_range(0..redexes.len())],
        };
        let dist = ptrs.step(&t, r).expect("redex from enumeration");
        let mut u: f64 = rng.gen();
        let last = dist.len() - 1;
        for (i, (p, next)) in dist.into_iter().enumerate() {
            let p = p.to_f64().unwrap_or(0.0);
            if u < p || i == last {
                t = next;
                break;
            }
            u -= p;
        }
    }
    let done = ptrs.innermost_redexes(&t).is_empty();
    (max_steps, done)
}

pub fn sample_run_seeded(t: &Term, ptrs: &Ptrs, policy: SamplePolicy, max_steps: usize, seed: u64) -> (usize, bool) {
    sample_run(t, ptrs, policy, max_steps, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub samples: usize,
    pub mean: f64,
    pub stddev: f64,
    pub terminated: f64,
}

/// Runs `samples` independent paths from one seeded stream.
pub fn simulate(t: &Term, ptrs: &Ptrs, policy: SamplePolicy, samples: usize, max_steps: usize, seed: u64) -> SimulationSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sq, mut done) = (0.0, 0.0, 0usize);
    for _ in 0..samples {
        let (n, ok) = sample_run(t, ptrs, policy, max_steps, &mut rng);
        sum += n as f64;
        sq += (n as f64) * (n as f64);
        done += ok as usize;
    }
    let n = samples.max(1) as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0);
    SimulationSummary { samples, mean, stddev: var.sqrt(), terminated: done as f64 / n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_ptrs, parse_term};
    use crate::{rat, systems};

    fn term(p: &Ptrs, s: &str) -> Term {
        parse_term(s, &p.vars, p.symbols(), false).unwrap()
    }

    #[test]
    fn geo_closed_form() {
        let p = parse_ptrs(systems::R_GEO).unwrap();
        let t = term(&p, "geo(0)");
        let mut o = Oracle::new(&p);
        for d in 1..=12usize {
            let expected = rat(2, 1) - rat(1, 1 << (d - 1));
            assert_eq!(o.edh(&t, d).unwrap(), expected, "depth {}", d);
        }
        assert_eq!(o.edh(&term(&p, "0"), 99).unwrap(), rat(0, 1));
    }

    #[test]
    fn figure_one_tree() {
        let p = parse_ptrs(systems::R_GEO).unwrap();
        let t = term(&p, "geo(0)");
        let rst = Rst::build(&t, &p, 2, RedexPolicy::LeftmostInnermost).unwrap();
        assert_eq!(rst.edl(), rat(3, 2));
        assert_eq!(rst.frontier_mass(), rat(1, 1));
        let rst = Rst::build(&t, &p, 3, RedexPolicy::Maximize).unwrap();
        assert_eq!(edl_of_rst(&rst), rat(7, 4));
        assert_eq!(Rst::single(t).edl(), rat(0, 1));
    }

    #[test]
    fn budget_is_enforced() {
        let p = parse_ptrs(systems::R_RW).unwrap();
        let mut o = Oracle::with_budget(&p, 10);
        assert_eq!(o.edh(&term(&p, "g"), 50), Err(OracleError::ResourceLimit(10)));
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = parse_ptrs(systems::R_GEO).unwrap();
        let t = term(&p, "geo(0)");
        let a = simulate(&t, &p, SamplePolicy::RandomRedex, 500, 100, 3);
        let b = simulate(&t, &p, SamplePolicy::RandomRedex, 500, 100, 3);
        assert_eq!(a, b);
        assert_eq!(sample_run_seeded(&term(&p, "0"), &p, SamplePolicy::LeftmostInnermost, 10, 1), (0, true));
    }
}
