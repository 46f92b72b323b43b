//! The solving loop: search-free processors first, then ROI, then reduction pairs.

use std::time::{Duration, Instant};

use crate::adp::AdpProblem;
use crate::processors::roi::roi_targets;
use crate::processors::rp::RpConfig;
use crate::processors::smt::SmtConfig;
use crate::processors::solver::CspConfig;
use crate::processors::{proc_dg, proc_kp, proc_pr, proc_roi, proc_rp, proc_ur, ProcError, ProcessorResult, TemplateKind};
use crate::proof::{ProofNode, Step};

#[derive(Clone, Debug)]
pub struct StrategyConfig {
    pub timeout: Duration,
    pub max_coeff: i64,
    /// How many ROI applications a lineage may use; 0 disables ROI.
    pub roi_budget: usize,
    pub smt: Option<SmtConfig>,
    pub csp: CspConfig,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig { timeout: Duration::from_secs(60), max_coeff: 3, roi_budget: 3, smt: None, csp: CspConfig::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub tree: ProofNode,
    pub timed_out: bool,
}

#[derive(Clone, Copy)]
struct Lineage {
    roi_left: usize,
    rp_done: bool,
}

struct Run {
    rp: RpConfig,
    deadline: Instant,
    timed_out: bool,
}

pub fn solve(p0: &AdpProblem, cfg: &StrategyConfig) -> Solved {
    let deadline = Instant::now() + cfg.timeout;
    let rp = RpConfig { max_coeff: cfg.max_coeff, csp: cfg.csp.clone(), smt: cfg.smt.clone() }.with_deadline(Some(deadline));
    let mut run = Run { rp, deadline, timed_out: false };
    let tree = run.node(p0.clone(), Lineage { roi_left: cfg.roi_budget, rp_done: false });
    Solved { tree, timed_out: run.timed_out }
}

impl Run {
    fn expired(&mut self) -> bool {
        if Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn node(&mut self, p: AdpProblem, mut lin: Lineage) -> ProofNode {
        if p.is_solved() || self.expired() {
            return ProofNode::leaf(p);
        }
        let Some(r) = self.step(&p, &mut lin) else { return ProofNode::leaf(p) };
        let children = r.subproblems.into_iter().map(|q| self.node(q, lin)).collect();
        ProofNode { problem: p, label: r.complexity, step: Some(Step { processor: r.processor, witness: r.witness }), children }
    }

    /// The first applicable processor in strategy order.
    fn step(&mut self, p: &AdpProblem, lin: &mut Lineage) -> Option<ProcessorResult> {
        let ok = |r: Result<ProcessorResult, ProcError>| r.ok();
        if let Some(r) = ok(proc_dg(p)).or_else(|| ok(proc_ur(p))).or_else(|| ok(proc_kp(p))).or_else(|| ok(proc_pr(p, &self.rp))) {
            return Some(r);
        }
        if lin.roi_left > 0 && !lin.rp_done {
            let hit = roi_targets(p).into_iter().find_map(|(a, j, pos)| proc_roi(p, a, j, &pos).ok());
            if let Some(r) = hit {
                lin.roi_left -= 1;
                return Some(r);
            }
        }
        if self.expired() {
            return None;
        }
        let r = ok(proc_rp(p, &self.rp, &TemplateKind::CPI)).or_else(|| ok(proc_rp(p, &self.rp, &TemplateKind::NON_CPI)));
        if r.is_some() {
            lin.rp_done = true;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adp::canonical_problem;
    use crate::complexity::Complexity;
    use crate::parse::parse_ptrs;
    use crate::proof::check_soundness_bookkeeping;
    use crate::systems;

    fn run(src: &str, cfg: &StrategyConfig) -> ProofNode {
        solve(&canonical_problem(&parse_ptrs(src).unwrap()), cfg).tree
    }

    #[test]
    fn geometric_is_constant() {
        let t = run(systems::R_GEO, &StrategyConfig::default());
        assert!(t.is_solved());
        assert_eq!(t.bound(), Complexity::ZERO);
        assert!(check_soundness_bookkeeping(&t).is_empty());
    }

    #[test]
    fn leading_example_is_linear() {
        let t = run(systems::R1, &StrategyConfig::default());
        assert!(t.is_solved(), "{}", t.render());
        assert_eq!(t.bound(), Complexity::Pol(1));
        assert!(check_soundness_bookkeeping(&t).is_empty());
    }

    #[test]
    fn non_sast_stays_open() {
        let t = run(systems::R2, &StrategyConfig { timeout: Duration::from_secs(20), ..Default::default() });
        assert!(!t.is_solved());
        assert_eq!(t.bound(), Complexity::Omega);
    }

    #[test]
    fn overlap_needs_roi() {
        let t = run(systems::R_ROI, &StrategyConfig::default());
        assert!(t.is_solved(), "{}", t.render());
        assert_eq!(t.bound(), Complexity::ZERO);
        assert!(check_soundness_bookkeeping(&t).is_empty());
        let t = run(systems::R_ROI, &StrategyConfig { roi_budget: 0, ..Default::default() });
        assert!(!t.is_solved());
    }
}
