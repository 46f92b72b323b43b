//! Dependency graph estimation, SCC-prefixes, and the DG and KP processors.

use std::collections::{BTreeMap, BTreeSet};

use crate::adp::{dp_bot, np, Adp, AdpId, AdpProblem, Dp, Rule};
use crate::complexity::Complexity;
use crate::ptrs::is_nf_wrt;
use crate::term::{Position, Term, VarGen};

use super::{na, ProcError, Processor, ProcessorResult, Witness};

/// Nodes are the distinct DPs of dp⊥ over all ADPs, in ADP order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DepGraph {
    pub nodes: Vec<Dp>,
    pub owners: Vec<BTreeSet<AdpId>>,
    pub edges: BTreeSet<(usize, usize)>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SccPrefix {
    pub scc: BTreeSet<usize>,
    pub nodes: BTreeSet<usize>,
}

impl DepGraph {
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j)
    }

    /// reach[i][j]: a nonempty path from i to j exists.
    pub fn reach_plus(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            let mut stack: Vec<usize> = self.successors(i).collect();
            while let Some(j) = stack.pop() {
                if !row[j] {
                    row[j] = true;
                    stack.extend(self.successors(j));
                }
            }
        }
        r
    }

    /// Nontrivial SCCs: cycles of length ≥ 1.
    pub fn sccs(&self) -> Vec<BTreeSet<usize>> {
        let r = self.reach_plus();
        let n = self.nodes.len();
        let mut done = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if done[i] || !r[i][i] {
                continue;
            }
            let c: BTreeSet<usize> = (0..n).filter(|&j| j == i || (r[i][j] && r[j][i])).collect();
            c.iter().for_each(|&j| done[j] = true);
            out.push(c);
        }
        out
    }

    pub fn node_of(&self, d: &Dp) -> Option<usize> {
        self.nodes.iter().position(|n| n == d)
    }
}

/// Builds the estimated P-dependency graph.
pub fn dep_graph(adps: &[Adp]) -> DepGraph {
    let mut nodes: Vec<Dp> = Vec::new();
    let mut owners: Vec<BTreeSet<AdpId>> = Vec::new();
    for a in adps {
        for d in dp_bot(a) {
            match nodes.iter().position(|n| *n == d) {
                Some(i) => {
                    owners[i].insert(a.id);
                }
                None => {
                    nodes.push(d);
                    owners.push([a.id].into_iter().collect());
                }
            }
        }
    }
    let rules = np(adps);
    let lhss: Vec<Term> = adps.iter().map(|a| a.lhs.clone()).collect();
    let mut edges = BTreeSet::new();
    for (i, d1) in nodes.iter().enumerate() {
        let Some(t) = &d1.rhs else { continue };
        for (j, d2) in nodes.iter().enumerate() {
            if may_follow(t, &d2.lhs, &rules, &lhss) {
                edges.insert((i, j));
            }
        }
    }
    DepGraph { nodes, owners, edges }
}

/// Whether an instance of `t` can reduce with np-rules to an instance of `l` in argument normal form.
pub fn may_follow(t: &Term, l: &Term, rules: &[Rule], lhss: &[Term]) -> bool {
    if t.root() != l.root() {
        return false;
    }
    let mut gen = VarGen::new();
    let capped = cap(t, rules, &mut gen, true);
    let l = gen.rename_apart(l);
    let Some(delta) = Term::unify(&capped, &l) else { return false };
    l.apply(&delta).args().iter().all(|a| is_nf_wrt(a, lhss))
}

/// tcap: variables become fresh, and a non-root subterm whose capped form unifies with an
/// np-rule left-hand side becomes fresh.
pub fn cap(t: &Term, rules: &[Rule], gen: &mut VarGen, root: bool) -> Term {
    match t {
        Term::Var(_) => Term::Var(gen.fresh()),
        Term::App { sym, annotated, args } => {
            let args = args.iter().map(|a| cap(a, rules, gen, false)).collect();
            let u = Term::App { sym: sym.clone(), annotated: *annotated, args };
            if !root && rules.iter().any(|r| r.lhs.root() == Some(sym) && Term::unify(&u, &gen.rename_apart(&r.lhs)).is_some()) {
                Term::Var(gen.fresh())
            } else {
                u
            }
        }
    }
}

/// Maximal sets of pairwise reach-comparable nodes that reach some SCC.
pub fn scc_prefixes(g: &DepGraph) -> Vec<SccPrefix> {
    let r = g.reach_plus();
    let n = g.nodes.len();
    let reaches = |a: usize, b: usize| a == b || r[a][b];
    let mut out: Vec<SccPrefix> = Vec::new();
    for scc in g.sccs() {
        let anchor = *scc.iter().next().expect("nonempty scc");
        let cand: Vec<usize> = (0..n).filter(|&v| reaches(v, anchor)).collect();
        let adj = |a: usize, b: usize| reaches(a, b) || reaches(b, a);
        let mut cliques = Vec::new();
        bron_kerbosch(&mut Vec::new(), cand.clone(), Vec::new(), &adj, &mut cliques);
        for c in cliques {
            let p = SccPrefix { scc: scc.clone(), nodes: c.into_iter().collect() };
            if !out.iter().any(|q| q.nodes == p.nodes) {
                out.push(p);
            }
        }
    }
    out.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    out
}

fn bron_kerbosch(r: &mut Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, adj: &impl Fn(usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    while let Some(v) = p.first().copied() {
        r.push(v);
        let np: Vec<usize> = p.iter().copied().filter(|&u| u != v && adj(u, v)).collect();
        let nx: Vec<usize> = x.iter().copied().filter(|&u| u != v && adj(u, v)).collect();
        bron_kerbosch(r, np, nx, adj, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// α|_J: annotations survive exactly where the induced DP is in J.
pub fn restrict_to_prefix(adp: &Adp, g: &DepGraph, prefix: &SccPrefix) -> Adp {
    let lhs = adp.lhs.with_root_flag(true);
    let keep: BTreeSet<&Dp> = prefix.nodes.iter().map(|&i| &g.nodes[i]).collect();
    let rhs = adp
        .rhs
        .iter()
        .map(|(p, r)| {
            let phi: BTreeSet<Position> = r
                .annotated_subterms()
                .into_iter()
                .filter(|(_, t)| keep.contains(&Dp { lhs: lhs.clone(), rhs: Some(t.with_root_flag(true)) }))
                .map(|(pos, _)| pos)
                .collect();
            (p.clone(), r.annotate(&phi, &Default::default()).expect("annotated positions stay valid"))
        })
        .collect();
    Adp { rhs, ..adp.clone() }
}

pub(crate) fn split_by_prefixes(problem: &AdpProblem, g: &DepGraph, prefixes: &[SccPrefix]) -> Vec<AdpProblem> {
    prefixes
        .iter()
        .map(|j| AdpProblem::new(problem.adps.iter().map(|a| restrict_to_prefix(a, g, j)).collect(), problem.s.clone()))
        .collect()
}

pub fn proc_dg(problem: &AdpProblem) -> Result<ProcessorResult, ProcError> {
    let graph = dep_graph(&problem.adps);
    let prefixes = scc_prefixes(&graph);
    let subproblems = split_by_prefixes(problem, &graph, &prefixes);
    // A prefix that keeps every annotation reproduces the input, so the split makes no progress.
    if subproblems.iter().any(|q| q.adps == problem.adps) {
        return na("an SCC-prefix covers every annotation");
    }
    Ok(ProcessorResult {
        processor: Processor::Dg,
        complexity: Complexity::ZERO,
        subproblems,
        witness: Witness::DependencyGraph { graph, prefixes },
    })
}

/// Pre(α): the ADPs owning a node with an edge into dp⊥(α).
pub fn pre_set(g: &DepGraph, alpha: AdpId) -> BTreeSet<AdpId> {
    let targets: BTreeSet<usize> = (0..g.nodes.len()).filter(|&j| g.owners[j].contains(&alpha)).collect();
    g.edges.iter().filter(|(_, j)| targets.contains(j)).flat_map(|&(i, _)| g.owners[i].iter().copied()).collect()
}

/// Moves the first α ∈ S with Pre(α) ∩ S = ∅ out of S.
pub fn proc_kp(problem: &AdpProblem) -> Result<ProcessorResult, ProcError> {
    let g = dep_graph(&problem.adps);
    for a in problem.adps.iter().filter(|a| problem.s.contains(&a.id)) {
        let pre = pre_set(&g, a.id);
        if pre.is_disjoint(&problem.s) {
            let mut s = problem.s.clone();
            s.remove(&a.id);
            return Ok(ProcessorResult {
                processor: Processor::Kp,
                complexity: Complexity::ZERO,
                subproblems: vec![AdpProblem::new(problem.adps.clone(), s)],
                witness: Witness::KnowledgePropagation { alpha: a.id, pre },
            });
        }
    }
    na("every ADP of S has a predecessor in S")
}

/// Edges as 1-based labels, for display and tests.
pub fn labelled_edges(g: &DepGraph, base: usize) -> BTreeMap<usize, BTreeSet<usize>> {
    let mut out: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(i, j) in &g.edges {
        out.entry(i + base).or_default().insert(j + base);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adp::canonical_problem;
    use crate::parse::parse_ptrs;
    use crate::systems;

    #[test]
    fn leading_example_graph() {
        let p = canonical_problem(&parse_ptrs(systems::R1).unwrap());
        let g = dep_graph(&p.adps);
        assert_eq!(g.nodes.len(), 6);
        let e = labelled_edges(&g, 9);
        assert_eq!(e[&9], [12, 13, 14].into_iter().collect());
        assert_eq!(e[&10], [11].into_iter().collect());
        assert_eq!(e[&11], [11].into_iter().collect());
        assert!(!e.contains_key(&14));
        let pre = scc_prefixes(&g);
        let sets: Vec<Vec<usize>> = pre.iter().map(|j| j.nodes.iter().map(|i| i + 9).collect()).collect();
        assert_eq!(sets, vec![vec![9, 12, 13], vec![10, 11]]);
    }

    #[test]
    fn restriction_keeps_only_prefix_annotations() {
        let p = canonical_problem(&parse_ptrs(systems::R1).unwrap());
        let res = proc_dg(&p).unwrap();
        assert_eq!(res.subproblems.len(), 2);
        assert_eq!(res.subproblems[1].adps[0].rhs[0].1.to_string(), "q(geo#(x),y,y)");
        assert_eq!(res.subproblems[0].adps[0].rhs[0].1.to_string(), "q#(geo(x),y,y)");
        assert!(!res.subproblems[0].adps[1].has_annotations());
        assert!(proc_dg(&res.subproblems[0]).is_err());
    }

    #[test]
    fn knowledge_propagation_drops_unreachable() {
        let p = canonical_problem(&parse_ptrs(systems::R1).unwrap());
        let res = proc_kp(&p).unwrap();
        assert_eq!(res.witness, Witness::KnowledgePropagation { alpha: AdpId(1), pre: BTreeSet::new() });
    }
}
