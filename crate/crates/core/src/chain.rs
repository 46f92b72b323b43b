//! Truncated chain trees of ADP problems.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use crate::adp::{adp_redexes, adp_step, Adp, AdpId, Case};
use crate::oracle::{OracleError, DEFAULT_NODE_BUDGET};
use crate::term::{Position, Term};
use crate::Rational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepRecord {
    pub adp: AdpId,
    pub case: Case,
    pub pos: Position,
}

#[derive(Clone, Debug)]
pub struct ChainNode {
    pub prob: Rational,
    pub term: Term,
    pub step: Option<StepRecord>,
    pub truncated: bool,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ChainTree {
    pub nodes: Vec<ChainNode>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExpandMode {
    /// One tree maximizing the truncated edl.
    Maximize,
    /// Every tree obtainable by choosing a redex at each inner node.
    All,
}

/// Memoized max-recurrence over chain trees: the value of a term at depth d is
/// the best over redexes of [counted step] + Σ p_j · value(t_j, d-1).
pub struct ChainEvaluator<'a> {
    adps: &'a [Adp],
    s: &'a BTreeSet<AdpId>,
    memo: HashMap<(Term, usize), Rational>,
    budget: usize,
}

impl<'a> ChainEvaluator<'a> {
    pub fn new(adps: &'a [Adp], s: &'a BTreeSet<AdpId>) -> Self {
        ChainEvaluator { adps, s, memo: HashMap::new(), budget: DEFAULT_NODE_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn value(&mut self, t: &Term, depth: usize) -> Result<Rational, OracleError> {
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
        for (i, pos, sigma) in self.steps(t) {
            let v = self.step_value(t, i, &pos, &sigma, depth)?;
            if v > best {
                best = v;
            }
        }
        self.memo.insert(key, best.clone());
        Ok(best)
    }

    fn steps(&self, t: &Term) -> Vec<(usize, Position, crate::term::Subst)> {
        adp_redexes(t, self.adps).into_iter().map(|r| (r.rule, r.pos, r.sigma)).collect()
    }

    fn step_value(&mut self, t: &Term, i: usize, pos: &Position, sigma: &crate::term::Subst, depth: usize) -> Result<Rational, OracleError> {
        let adp = &self.adps[i];
        let (dist, case) = adp_step(t, self.adps, pos, adp, sigma).expect("redex from enumeration");
        let mut v = if case.counts() && self.s.contains(&adp.id) { Rational::from_integer(1.into()) } else { Rational::zero() };
        for (p, u) in dist {
            v += p * self.value(&u, depth - 1)?;
        }
        Ok(v)
    }
}

/// Expands chain trees from `t0` to the given depth.
pub fn expand_chain_tree(
    t0: &Term,
    adps: &[Adp],
    s: &BTreeSet<AdpId>,
    depth: usize,
    mode: ExpandMode,
) -> Result<Vec<ChainTree>, OracleError> {
    match mode {
        ExpandMode::Maximize => {
            let mut ev = ChainEvaluator::new(adps, s);
            let mut tree = ChainTree { nodes: Vec::new() };
            expand_max(&mut tree, t0.clone(), Rational::from_integer(1.into()), depth, &mut ev)?;
            Ok(vec![tree])
        }
        ExpandMode::All => {
            let mut budget = DEFAULT_NODE_BUDGET;
            let forests = expand_all(t0, Rational::from_integer(1.into()), depth, adps, &mut budget)?;
            Ok(forests.into_iter().map(|nodes| ChainTree { nodes }).collect())
        }
    }
}

fn expand_max(tree: &mut ChainTree, t: Term, prob: Rational, depth: usize, ev: &mut ChainEvaluator) -> Result<usize, OracleError> {
    if tree.nodes.len() >= ev.budget {
        return Err(OracleError::ResourceLimit(ev.budget));
    }
    let id = tree.nodes.len();
    let steps = ev.steps(&t);
    tree.nodes.push(ChainNode { prob: prob.clone(), term: t.clone(), step: None, truncated: depth == 0 && !steps.is_empty(), children: vec![] });
    if depth == 0 || steps.is_empty() {
        return Ok(id);
    }
    let mut best: Option<(Rational, usize)> = None;
    for (k, (i, pos, sigma)) in steps.iter().enumerate() {
        let v = ev.step_value(&t, *i, pos, sigma, depth)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, k));
        }
    }
    let (i, pos, sigma) = steps[best.expect("nonempty").1].clone();
    let adp = &ev.adps[i];
    let (dist, case) = adp_step(&t, ev.adps, &pos, adp, &sigma).expect("redex from enumeration");
    tree.nodes[id].step = Some(StepRecord { adp: adp.id, case, pos });
    for (p, u) in dist {
        let c = expand_max(tree, u, &prob * p, depth - 1, ev)?;
        tree.nodes[id].children.push(c);
    }
    Ok(id)
}

fn expand_all(t: &Term, prob: Rational, depth: usize, adps: &[Adp], budget: &mut usize) -> Result<Vec<Vec<ChainNode>>, OracleError> {
    if *budget == 0 {
        return Err(OracleError::ResourceLimit(DEFAULT_NODE_BUDGET));
    }
    *budget -= 1;
    let redexes = adp_redexes(t, adps);
    let leaf = ChainNode { prob: prob.clone(), term: t.clone(), step: None, truncated: depth == 0 && !redexes.is_empty(), children: vec![] };
    if depth == 0 || redexes.is_empty() {
        return Ok(vec![vec![leaf]]);
    }
    let mut out = Vec::new();
    for r in redexes {
        let adp = &adps[r.rule];
        let (dist, case) = adp_step(t, adps, &r.pos, adp, &r.sigma).expect("redex from enumeration");
        // Cartesian product of the children's alternatives.
        let mut partial: Vec<Vec<Vec<ChainNode>>> = vec![vec![]];
        for (p, u) in &dist {
            let alts = expand_all(u, &prob * p, depth - 1, adps, budget)?;
            let mut next = Vec::new();
            for prefix in &partial {
                for alt in &alts {
                    let mut v = prefix.clone();
                    v.push(alt.clone());
                    next.push(v);
                }
            }
            partial = next;
        }
        for subtrees in partial {
            let mut nodes = vec![ChainNode { step: Some(StepRecord { adp: adp.id, case, pos: r.pos.clone() }), ..leaf.clone() }];
            for sub in subtrees {
                let offset = nodes.len();
                nodes[0].children.push(offset);
                nodes.extend(sub.into_iter().map(|mut n| {
                    n.children.iter_mut().for_each(|c| *c += offset);
                    n
                }));
            }
            out.push(nodes);
        }
    }
    Ok(out)
}

/// Σ p_v over inner nodes whose step uses an ADP of S at an annotated position.
pub fn edl_chain(tree: &ChainTree, s: &BTreeSet<AdpId>) -> Rational {
    tree.nodes
        .iter()
        .filter_map(|n| n.step.as_ref().filter(|st| st.case.counts() && s.contains(&st.adp)).map(|_| n.prob.clone()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adp::canonical_adps;
    use crate::parse::{parse_ptrs, parse_term};
    use crate::{rat, systems};

    #[test]
    fn figure_two() {
        let r = parse_ptrs(systems::R_GEO).unwrap();
        let adps = canonical_adps(&r);
        let s: BTreeSet<AdpId> = adps.iter().map(|a| a.id).collect();
        let t = parse_term("geo#(0)", &r.vars, r.symbols(), false).unwrap();
        let trees = expand_chain_tree(&t, &adps, &s, 2, ExpandMode::Maximize).unwrap();
        assert_eq!(edl_chain(&trees[0], &s), rat(3, 2));
        assert_eq!(edl_chain(&trees[0], &BTreeSet::new()), rat(0, 1));
        assert!(trees[0].nodes.iter().filter_map(|n| n.step.as_ref()).all(|st| st.case == Case::At));
        let all = expand_chain_tree(&t, &adps, &s, 2, ExpandMode::All).unwrap();
        assert_eq!(all.len(), 1);
        let nf = parse_term("0", &r.vars, r.symbols(), false).unwrap();
        assert_eq!(expand_chain_tree(&nf, &adps, &s, 5, ExpandMode::Maximize).unwrap()[0].nodes.len(), 1);
    }
}
