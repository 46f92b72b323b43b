//! A small backtracking solver for polynomial inequalities over bounded natural unknowns.

use std::time::Instant;

/// Σ coeff · Π unknowns; an unknown may repeat in a product.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntPoly {
    pub terms: Vec<(i64, Vec<usize>)>,
}

impl IntPoly {
    pub fn unknowns(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|(_, m)| m.iter().copied())
    }

    /// Largest value over the box lo..=hi (all bounds are nonnegative).
    fn upper(&self, lo: &[i64], hi: &[i64]) -> i64 {
        let mut s = 0i64;
        for (c, m) in &self.terms {
            let b = if *c > 0 { hi } else { lo };
            let mut v = *c;
            for &u in m {
                v = v.saturating_mul(b[u]);
            }
            s = s.saturating_add(v);
        }
        s
    }

    pub fn eval(&self, values: &[i64]) -> i64 {
        self.upper(values, values)
    }
}

/// Find values with every constraint ≥ 0 and at least `min_strict` of `strict` ≥ 1,
/// maximizing how many of `strict` are ≥ 1.
#[derive(Clone, Debug, Default)]
pub struct CspProblem {
    pub domains: Vec<(i64, i64)>,
    pub constraints: Vec<IntPoly>,
    pub strict: Vec<IntPoly>,
    pub min_strict: usize,
}

#[derive(Clone, Debug)]
pub struct CspConfig {
    pub node_budget: usize,
    /// Extra nodes spent improving the first solution.
    pub improve_budget: usize,
    pub deadline: Option<Instant>,
}

impl Default for CspConfig {
    fn default() -> Self {
        CspConfig { node_budget: 200_000, improve_budget: 20_000, deadline: None }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CspOutcome {
    Solved { values: Vec<i64>, strict: Vec<bool> },
    Infeasible,
    GaveUp,
}

struct Search<'a> {
    p: &'a CspProblem,
    cfg: &'a CspConfig,
    lo: Vec<i64>,
    hi: Vec<i64>,
    order: Vec<usize>,
    watch: Vec<Vec<usize>>,
    nodes: usize,
    limit: usize,
    best: Option<(usize, Vec<i64>)>,
    stopped: bool,
}

impl Search<'_> {
    fn strict_possible(&self) -> usize {
        self.p.strict.iter().filter(|s| s.upper(&self.lo, &self.hi) >= 1).count()
    }

    fn needed(&self) -> usize {
        match &self.best {
            Some((k, _)) => k + 1,
            None => self.p.min_strict,
        }
    }

    fn go(&mut self, depth: usize) {
        if self.stopped {
            return;
        }
        if depth == self.order.len() {
            let count = self.strict_possible();
            if count >= self.needed() {
                if self.best.is_none() {
                    self.limit = self.nodes.saturating_add(self.cfg.improve_budget).min(self.limit);
                }
                self.best = Some((count, self.lo.clone()));
                if count == self.p.strict.len() {
                    self.stopped = true;
                }
            }
            return;
        }
        let u = self.order[depth];
        let (lo0, hi0) = (self.lo[u], self.hi[u]);
        for v in lo0..=hi0 {
            self.nodes += 1;
            if self.nodes >= self.limit || (self.nodes % 1024 == 0 && self.cfg.deadline.is_some_and(|d| Instant::now() >= d)) {
                self.stopped = true;
                break;
            }
            self.lo[u] = v;
            self.hi[u] = v;
            let ok = self.watch[u].iter().all(|&c| self.p.constraints[c].upper(&self.lo, &self.hi) >= 0)
                && self.strict_possible() >= self.needed();
            if ok {
                self.go(depth + 1);
            }
            if self.stopped {
                break;
            }
        }
        self.lo[u] = lo0;
        self.hi[u] = hi0;
    }
}

pub fn solve_csp(p: &CspProblem, cfg: &CspConfig) -> CspOutcome {
    let n = p.domains.len();
    let mut watch = vec![Vec::new(); n];
    let mut occ = vec![0usize; n];
    for (i, c) in p.constraints.iter().enumerate() {
        for u in c.unknowns() {
            if watch[u].last() != Some(&i) {
                watch[u].push(i);
            }
            occ[u] += 1;
        }
    }
    for s in &p.strict {
        s.unknowns().for_each(|u| occ[u] += 1);
    }
    let mut order: Vec<usize> = (0..n).filter(|&u| occ[u] > 0).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(occ[u]));
    let lo: Vec<i64> = p.domains.iter().map(|d| d.0).collect();
    let mut hi: Vec<i64> = p.domains.iter().map(|d| d.1).collect();
    // Unknowns that occur nowhere stay at their lower bound.
    for u in 0..n {
        if occ[u] == 0 {
            hi[u] = lo[u];
        }
    }
    if !p.constraints.iter().all(|c| c.upper(&lo, &hi) >= 0) {
        return CspOutcome::Infeasible;
    }
    let mut s = Search { p, cfg, lo, hi, order, watch, nodes: 0, limit: cfg.node_budget, best: None, stopped: false };
    s.go(0);
    let exhausted = !s.stopped || s.best.as_ref().is_some_and(|(k, _)| *k == p.strict.len());
    match s.best {
        Some((_, values)) => {
            let strict = p.strict.iter().map(|q| q.eval(&values) >= 1).collect();
            CspOutcome::Solved { values, strict }
        }
        None if exhausted => CspOutcome::Infeasible,
        None => CspOutcome::GaveUp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(i64, &[usize])]) -> IntPoly {
        IntPoly { terms: terms.iter().map(|(c, m)| (*c, m.to_vec())).collect() }
    }

    #[test]
    fn small_nonlinear_system() {
        // a·b − 2 ≥ 0, 3 − a ≥ 0, want c − b ≥ 1 and a − 1 ≥ 1
        let p = CspProblem {
            domains: vec![(0, 3), (0, 3), (0, 3)],
            constraints: vec![poly(&[(1, &[0, 1]), (-2, &[])]), poly(&[(3, &[]), (-1, &[0])])],
            strict: vec![poly(&[(1, &[2]), (-1, &[1])]), poly(&[(1, &[0]), (-1, &[])])],
            min_strict: 1,
        };
        match solve_csp(&p, &CspConfig::default()) {
            CspOutcome::Solved { values, strict } => {
                assert!(p.constraints.iter().all(|c| c.eval(&values) >= 0));
                assert_eq!(strict, vec![true, true]);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn infeasible_and_budget() {
        let p = CspProblem { domains: vec![(0, 3)], constraints: vec![poly(&[(-1, &[0]), (-1, &[])])], strict: vec![], min_strict: 0 };
        assert_eq!(solve_csp(&p, &CspConfig::default()), CspOutcome::Infeasible);
        let p = CspProblem {
            domains: vec![(0, 9); 8],
            constraints: vec![poly(&[(1, &[0]), (1, &[1]), (1, &[2]), (1, &[3]), (1, &[4]), (1, &[5]), (1, &[6]), (1, &[7]), (-70, &[])])],
            strict: vec![],
            min_strict: 0,
        };
        let cfg = CspConfig { node_budget: 5, ..CspConfig::default() };
        assert_eq!(solve_csp(&p, &cfg), CspOutcome::GaveUp);
    }
}
