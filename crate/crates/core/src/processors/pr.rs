//! Probability removal: hand non-probabilistic problems to a minimal DT solver.

use std::collections::BTreeSet;

use num_traits::One;

use crate::adp::{dt, np, Adp, AdpId, AdpProblem, Dt, Rule};
use crate::complexity::Complexity;
use crate::term::{Symbol, Term};
use crate::Rational;

use super::depgraph::may_follow;
use super::interp::{check_interpretation, Interpretation};
use super::rp::{synthesize, RpConfig, TemplateKind};
use super::{na, ProcError, Processor, ProcessorResult, Witness};

/// The non-probabilistic problem (P, S, K, R); K is every DT outside S.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DtProblem {
    pub dts: Vec<Dt>,
    pub s: BTreeSet<usize>,
    pub rules: Vec<Rule>,
    /// Left-hand sides that define argument normal forms.
    pub lhss: Vec<Term>,
}

impl DtProblem {
    pub fn k(&self) -> BTreeSet<usize> {
        (0..self.dts.len()).filter(|i| !self.s.contains(i)).collect()
    }
}

/// One reduction pair step of the DT solver, taken after pruning.
#[derive(Clone, PartialEq, Debug)]
pub struct PrStep {
    pub dts: Vec<Dt>,
    pub s: BTreeSet<usize>,
    pub interpretation: Interpretation,
    pub strict: BTreeSet<usize>,
    pub complexity: Complexity,
}

pub fn dt_problem(problem: &AdpProblem) -> Option<DtProblem> {
    let mut dts = Vec::new();
    let mut s = BTreeSet::new();
    for a in &problem.adps {
        let d = dt(a).ok()?;
        if problem.s.contains(&a.id) {
            s.insert(dts.len());
        }
        dts.push(d);
    }
    Some(DtProblem { dts, s, rules: np(&problem.adps), lhss: problem.lhss() })
}

/// Drops rhs entries without successors, then DTs outside S with an empty rhs; to a fixpoint.
pub fn prune(p: &DtProblem) -> DtProblem {
    let mut dts = p.dts.clone();
    let mut s = p.s.clone();
    loop {
        let before = (dts.len(), dts.iter().map(|d| d.rhs.len()).sum::<usize>());
        for i in 0..dts.len() {
            let rhs: Vec<Term> =
                dts[i].rhs.iter().filter(|t| dts.iter().any(|d| may_follow(t, &d.lhs, &p.rules, &p.lhss))).cloned().collect();
            dts[i].rhs = rhs;
        }
        let keep: Vec<bool> = (0..dts.len()).map(|i| s.contains(&i) || !dts[i].rhs.is_empty()).collect();
        let mut idx = 0;
        let mut new_s = BTreeSet::new();
        let mut new_dts = Vec::new();
        for (i, d) in dts.into_iter().enumerate() {
            if keep[i] {
                if s.contains(&i) {
                    new_s.insert(idx);
                }
                new_dts.push(d);
                idx += 1;
            }
        }
        dts = new_dts;
        s = new_s;
        if before == (dts.len(), dts.iter().map(|d| d.rhs.len()).sum::<usize>()) {
            break;
        }
    }
    DtProblem { dts, s, rules: p.rules.clone(), lhss: p.lhss.clone() }
}

/// Encodes DTs and rules as ADPs so the RP machinery applies: ℓ → [t₁♯,…,tₙ♯] becomes
/// ℓ → {1: com(t₁♯,…,tₙ♯)}^false and each rule becomes an unannotated ADP with flag true.
pub fn as_adp_problem(p: &DtProblem) -> AdpProblem {
    let mut adps = Vec::new();
    for (i, d) in p.dts.iter().enumerate() {
        let com = Term::app(Symbol::new("⟨com⟩", d.rhs.len()), d.rhs.clone());
        adps.push(Adp { id: AdpId(i as u32 + 1), lhs: d.lhs.flat(), rhs: vec![(Rational::one(), com)], m: false });
    }
    for (i, r) in p.rules.iter().enumerate() {
        let id = AdpId((p.dts.len() + i) as u32 + 1);
        adps.push(Adp { id, lhs: r.lhs.clone(), rhs: vec![(Rational::one(), r.rhs.clone())], m: true });
    }
    let s = p.s.iter().map(|&i| AdpId(i as u32 + 1)).collect();
    AdpProblem::new(adps, s)
}

/// Runs the DT solver; `replay` checks given steps instead of searching.
pub fn solve_dt(p: &DtProblem, cfg: &RpConfig, replay: Option<&[PrStep]>) -> Result<(Complexity, Vec<PrStep>), String> {
    let mut cur = p.clone();
    let mut steps = Vec::new();
    let mut c = Complexity::ZERO;
    loop {
        cur = prune(&cur);
        if cur.s.is_empty() {
            if replay.is_some_and(|r| r.len() != steps.len()) {
                return Err("witness has extra steps".into());
            }
            return Ok((c, steps));
        }
        let enc = as_adp_problem(&cur);
        let (interpretation, strict_ids, cx) = match replay {
            Some(r) => {
                let st = r.get(steps.len()).ok_or("witness ends before S is empty")?;
                if st.dts != cur.dts || st.s != cur.s {
                    return Err(format!("step {} does not match the pruned problem", steps.len() + 1));
                }
                let ids: BTreeSet<AdpId> = st.strict.iter().map(|&i| AdpId(i as u32 + 1)).collect();
                check_interpretation(&enc.adps, &enc.s, &st.interpretation, &ids)?;
                (st.interpretation.clone(), ids, st.complexity)
            }
            None => {
                let syn = [TemplateKind::CpiConstant, TemplateKind::CpiLinear, TemplateKind::CpiMultilinear, TemplateKind::Multilinear]
                    .into_iter()
                    .find_map(|k| synthesize(&enc, cfg, k))
                    .ok_or("no interpretation for the DT problem")?;
                (syn.interpretation, syn.strict, syn.complexity)
            }
        };
        let strict: BTreeSet<usize> = strict_ids.iter().map(|id| id.0 as usize - 1).filter(|i| cur.s.contains(i)).collect();
        if strict.is_empty() {
            return Err("reduction pair step removes nothing".into());
        }
        c = c.oplus(cx);
        steps.push(PrStep { dts: cur.dts.clone(), s: cur.s.clone(), interpretation, strict: strict.clone(), complexity: cx });
        cur.s = cur.s.difference(&strict).copied().collect();
    }
}

pub fn proc_pr(problem: &AdpProblem, cfg: &RpConfig) -> Result<ProcessorResult, ProcError> {
    let Some(p) = dt_problem(problem) else { return na("some ADP is probabilistic") };
    match solve_dt(&p, cfg, None) {
        Ok((complexity, steps)) => Ok(ProcessorResult {
            processor: Processor::Pr,
            complexity,
            subproblems: vec![],
            witness: Witness::ProbabilityRemoval { steps },
        }),
        Err(e) => na(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adp::canonical_problem;
    use crate::parse::parse_ptrs;
    use crate::systems;

    #[test]
    fn addition_is_linear() {
        let p = canonical_problem(&parse_ptrs(systems::R_PLUS).unwrap());
        let r = proc_pr(&p, &RpConfig::default()).unwrap();
        assert_eq!(r.complexity, Complexity::Pol(1));
        let Witness::ProbabilityRemoval { steps } = &r.witness else { unreachable!() };
        let dtp = dt_problem(&p).unwrap();
        assert_eq!(solve_dt(&dtp, &RpConfig::default(), Some(steps)).unwrap().0, Complexity::Pol(1));
    }

    #[test]
    fn probabilistic_shape_is_rejected() {
        let p = canonical_problem(&parse_ptrs(systems::R_GEO).unwrap());
        assert!(proc_pr(&p, &RpConfig::default()).is_err());
    }

    #[test]
    fn leaves_outside_s_are_pruned() {
        let p = canonical_problem(&parse_ptrs(systems::R_Q).unwrap());
        let mut d = dt_problem(&p).unwrap();
        d.s = [0].into_iter().collect();
        let pruned = prune(&d);
        // start → [Q(x,y,y)] stays in S; the q-DTs reach each other and survive, q(0,s,s) → [] is dropped.
        assert_eq!(pruned.dts.len(), 3);
    }
}
