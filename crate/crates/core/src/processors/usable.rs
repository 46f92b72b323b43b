//! Usable rules.

use std::collections::{BTreeSet, HashSet};

use crate::adp::{Adp, AdpId, AdpProblem};
use crate::complexity::Complexity;
use crate::term::Term;

use super::{na, ProcError, ProcessorResult, Processor, Witness};

/// U(P): the union of U_P(t#) over all annotated subterms t of all right-hand sides.
pub fn usable_rules(adps: &[Adp]) -> BTreeSet<AdpId> {
    let avail: BTreeSet<usize> = (0..adps.len()).filter(|&i| adps[i].m).collect();
    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    for a in adps {
        for (_, r) in &a.rhs {
            for (_, t) in r.annotated_subterms() {
                // The annotated root has no rules of its own, so only its arguments contribute.
                for arg in t.args() {
                    collect(arg, adps, &avail, &mut out, &mut seen);
                }
            }
        }
    }
    out.into_iter().map(|i| adps[i].id).collect()
}

fn collect(t: &Term, adps: &[Adp], avail: &BTreeSet<usize>, out: &mut BTreeSet<usize>, seen: &mut HashSet<(Term, BTreeSet<usize>)>) {
    let Some(f) = t.root() else { return };
    if !seen.insert((t.clone(), avail.clone())) {
        return;
    }
    let rules: BTreeSet<usize> = avail.iter().copied().filter(|&i| adps[i].lhs.root() == Some(f)).collect();
    out.extend(&rules);
    let rest: BTreeSet<usize> = avail.difference(&rules).copied().collect();
    for arg in t.args() {
        collect(arg, adps, &rest, out, seen);
    }
    for &i in &rules {
        for (_, r) in &adps[i].rhs {
            collect(&r.flat(), adps, &rest, out, seen);
        }
    }
}

/// Sets the flag of every non-usable ADP to false.
pub fn proc_ur(problem: &AdpProblem) -> Result<ProcessorResult, ProcError> {
    let usable = usable_rules(&problem.adps);
    if !problem.adps.iter().any(|a| a.m && !usable.contains(&a.id)) {
        return na("every ADP with flag true is usable");
    }
    Ok(ProcessorResult {
        processor: Processor::Ur,
        complexity: Complexity::ZERO,
        subproblems: vec![apply_usable(problem, &usable)],
        witness: Witness::UsableRules { usable },
    })
}

pub(crate) fn apply_usable(problem: &AdpProblem, usable: &BTreeSet<AdpId>) -> AdpProblem {
    let adps = problem.adps.iter().map(|a| Adp { m: a.m && usable.contains(&a.id), ..a.clone() }).collect();
    AdpProblem::new(adps, problem.s.clone())
}
