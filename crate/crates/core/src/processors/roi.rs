//! Rule overlap instantiation.

use std::collections::{BTreeMap, BTreeSet};

use crate::adp::{Adp, AdpId, AdpProblem};
use crate::complexity::Complexity;
use crate::ptrs::is_anf_wrt;
use crate::term::{match_into, Position, Subst, Term, Var, VarGen};

use super::{na, ProcError, Processor, ProcessorResult, Witness};

/// Narrowing substitutions of `t` (a subterm of a rhs of an ADP with lhs `lhs`), restricted
/// to the variables of `lhs`. Duplicates are removed; order follows positions and ADPs.
pub fn narrowing_substitutions(t: &Term, lhs: &Term, adps: &[Adp]) -> Vec<Subst> {
    let lhss: Vec<Term> = adps.iter().map(|a| a.lhs.clone()).collect();
    let keep = lhs.vars();
    let mut gen = VarGen::new();
    let mut out: Vec<Subst> = Vec::new();
    for tau in t.function_positions() {
        let sub = t.subterm_at(&tau).expect("position from enumeration").flat();
        for a in adps {
            let l2 = gen.rename_apart(&a.lhs);
            let Some(delta) = Term::unify(&sub, &l2) else { continue };
            if !is_anf_wrt(&lhs.apply(&delta), &lhss) || !is_anf_wrt(&l2.apply(&delta), &lhss) {
                continue;
            }
            let d = canonical_range(&delta.restrict(&keep), &keep);
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

/// Renames the variables introduced by a substitution to `_1`, `_2`, … in order of appearance.
fn canonical_range(d: &Subst, keep: &BTreeSet<Var>) -> Subst {
    let mut names: BTreeMap<Var, Var> = keep.iter().map(|v| (v.clone(), v.clone())).collect();
    for t in d.0.values() {
        for v in t.vars_ordered() {
            let n = names.len() + 1 - keep.len();
            names.entry(v).or_insert_with(|| Var::new(&format!("_{}", n)));
        }
    }
    Subst(d.0.iter().map(|(k, t)| (k.clone(), t.rename(&|v| names[v].clone()))).collect())
}

/// ρ is an instance of δ on `vars`: some ρ' has xδρ' = xρ for every x.
fn more_general(delta: &Subst, rho: &Subst, vars: &BTreeSet<Var>) -> bool {
    let img = |s: &Subst, x: &Var| s.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()));
    let mut m = Subst::new();
    vars.iter().all(|x| match_into(&img(delta, x), &img(rho, x), &mut m))
}

/// t' is captured when every narrowing substitution of t' is an instance of some δ.
pub fn is_captured(t2: &Term, lhs: &Term, adps: &[Adp], deltas: &[Subst]) -> bool {
    let vars = lhs.vars();
    narrowing_substitutions(t2, lhs, adps).iter().all(|rho| deltas.iter().any(|d| more_general(d, rho, &vars)))
}

/// Annotated subterms with a defined symbol strictly below their root, largest first.
pub fn roi_targets(problem: &AdpProblem) -> Vec<(AdpId, usize, Position)> {
    let defined = problem.defined();
    let mut out = Vec::new();
    for a in &problem.adps {
        for (j, (_, r)) in a.rhs.iter().enumerate() {
            for (pos, t) in r.annotated_subterms() {
                if t.args().iter().any(|u| !u.defined_positions(&defined).is_empty()) {
                    out.push((t.size(), a.id, j, pos));
                }
            }
        }
    }
    out.sort_by(|x, y| y.0.cmp(&x.0));
    out.into_iter().map(|(_, a, j, p)| (a, j, p)).collect()
}

/// Renames the variables of an instantiated ADP to names not used elsewhere in the problem.
fn normalize(adp: &Adp, keep: &BTreeSet<Var>, used: &mut BTreeSet<Var>) -> Adp {
    let mut map: BTreeMap<Var, Var> = BTreeMap::new();
    let mut n = 0;
    for v in adp.lhs.vars_ordered() {
        if !keep.contains(&v) {
            let fresh = loop {
                n += 1;
                let c = Var::new(&format!("v{}", n));
                if !used.contains(&c) {
                    break c;
                }
            };
            used.insert(fresh.clone());
            map.insert(v, fresh);
        }
    }
    let f = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
    Adp { lhs: adp.lhs.rename(&f), rhs: adp.rhs.iter().map(|(p, r)| (p.clone(), r.rename(&f))).collect(), ..adp.clone() }
}

pub fn proc_roi(problem: &AdpProblem, alpha: AdpId, branch: usize, pos: &Position) -> Result<ProcessorResult, ProcError> {
    let Some(idx) = problem.adps.iter().position(|a| a.id == alpha) else { return na("unknown ADP") };
    let a = &problem.adps[idx];
    let Some((_, r)) = a.rhs.get(branch) else { return na("no such branch") };
    let Ok(t) = r.subterm_at(pos) else { return na("no such position") };
    if !t.is_annotated() {
        return na("position is not annotated");
    }
    let t = t.flat();
    let deltas = narrowing_substitutions(&t, &a.lhs, &problem.adps);
    let vars = a.lhs.vars();
    if deltas.is_empty() {
        return na("no narrowing substitutions");
    }
    if deltas.iter().any(|d| d.is_renaming_on(&vars)) {
        return na("a narrowing substitution is a renaming");
    }
    let mut used = problem.vars();
    let mut next = problem.next_id();
    let mut n_adps = Vec::new();
    for d in &deltas {
        let inst = Adp {
            id: AdpId(next),
            lhs: a.lhs.apply(d),
            rhs: a.rhs.iter().map(|(p, r)| (p.clone(), r.apply(d))).collect(),
            m: a.m,
        };
        next += 1;
        n_adps.push(normalize(&inst, &vars, &mut used));
    }
    let residue_rhs = a
        .rhs
        .iter()
        .map(|(p, r)| {
            let phi: BTreeSet<Position> =
                r.annotated_subterms().into_iter().filter(|(_, u)| !is_captured(u, &a.lhs, &problem.adps, &deltas)).map(|(q, _)| q).collect();
            (p.clone(), r.annotate(&phi, &Default::default()).expect("annotated positions stay valid"))
        })
        .collect();
    n_adps.push(Adp { id: AdpId(next), lhs: a.lhs.clone(), rhs: residue_rhs, m: a.m });
    let new_ids: BTreeSet<AdpId> = n_adps.iter().map(|b| b.id).collect();
    let mut adps = problem.adps.clone();
    adps.splice(idx..=idx, n_adps);
    let s = if problem.s.contains(&alpha) {
        problem.s.iter().copied().filter(|&i| i != alpha).chain(new_ids).collect()
    } else {
        problem.s.clone()
    };
    Ok(ProcessorResult {
        processor: Processor::Roi,
        complexity: Complexity::ZERO,
        subproblems: vec![AdpProblem::new(adps, s)],
        witness: Witness::RuleOverlap { alpha, branch, pos: pos.clone(), deltas },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adp::canonical_problem;
    use crate::parse::parse_ptrs;
    use crate::systems;

    #[test]
    fn overlap_example() {
        let p = canonical_problem(&parse_ptrs(systems::R_ROI).unwrap());
        let p = crate::processors::proc_dg(&p).unwrap().subproblems.remove(0);
        let targets = roi_targets(&p);
        assert_eq!(targets.len(), 2);
        let (a, j, pos) = targets[0].clone();
        assert_eq!((a, j, pos.to_string()), (AdpId(1), 0, "1".to_string()));
        let f = &p.adps[0];
        let t = f.rhs[0].1.subterm_at(&pos).unwrap().flat();
        let ds = narrowing_substitutions(&t, &f.lhs, &p.adps);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].to_string(), "{x -> a}");
        let other = f.rhs[0].1.subterm_at(&Position(vec![2])).unwrap().flat();
        assert!(!is_captured(&other, &f.lhs, &p.adps, &ds));
        let res = proc_roi(&p, a, j, &pos).unwrap();
        let q = &res.subproblems[0];
        assert_eq!(q.adps[0].to_string(), "f(d(a)) -> {3/4: e(f#(g(a)),f#(h(a))), 1/4: a}^true");
        assert_eq!(q.adps[1].to_string(), "f(d(x)) -> {3/4: e(f(g(x)),f#(h(x))), 1/4: a}^true");
        assert_eq!(q.s.len(), 4);
        assert!(!q.s.contains(&AdpId(1)));
    }

    #[test]
    fn no_overlap_is_not_applicable() {
        let p = canonical_problem(&parse_ptrs(systems::R_GEO).unwrap());
        assert!(proc_roi(&p, AdpId(1), 0, &Position::root()).is_err());
        assert!(roi_targets(&p).is_empty());
    }
}
