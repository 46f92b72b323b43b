//! The ADP processors.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::adp::{AdpId, AdpProblem};
use crate::complexity::Complexity;
use crate::term::{Position, Subst};

pub mod depgraph;
pub mod interp;
pub mod pr;
pub mod roi;
pub mod rp;
pub mod smt;
pub mod solver;
pub mod usable;

pub use depgraph::{dep_graph, pre_set, proc_dg, proc_kp, restrict_to_prefix, scc_prefixes, DepGraph, SccPrefix};
pub use interp::{classify_interpretation, gen_rp_constraints, CoeffConstraint, Interpretation};
pub use pr::proc_pr;
pub use roi::{is_captured, narrowing_substitutions, proc_roi};
pub use rp::{proc_rp, RpConfig, TemplateKind};
pub use usable::{proc_ur, usable_rules};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Processor {
    Dg,
    Ur,
    Kp,
    Pr,
    Rp,
    Roi,
}

impl Processor {
    pub fn name(self) -> &'static str {
        match self {
            Processor::Dg => "DG",
            Processor::Ur => "UR",
            Processor::Kp => "KP",
            Processor::Pr => "PR",
            Processor::Rp => "RP",
            Processor::Roi => "ROI",
        }
    }

    pub fn from_name(s: &str) -> Option<Processor> {
        [Processor::Dg, Processor::Ur, Processor::Kp, Processor::Pr, Processor::Rp, Processor::Roi].into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Processor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evidence that lets a checker replay a processor's side conditions.
#[derive(Clone, PartialEq, Debug)]
pub enum Witness {
    UsableRules { usable: BTreeSet<AdpId> },
    DependencyGraph { graph: DepGraph, prefixes: Vec<SccPrefix> },
    ReductionPair { interpretation: Interpretation, strict: BTreeSet<AdpId> },
    KnowledgePropagation { alpha: AdpId, pre: BTreeSet<AdpId> },
    ProbabilityRemoval { steps: Vec<pr::PrStep> },
    RuleOverlap { alpha: AdpId, branch: usize, pos: Position, deltas: Vec<Subst> },
}

#[derive(Clone, PartialEq, Debug)]
pub struct ProcessorResult {
    pub processor: Processor,
    pub complexity: Complexity,
    pub subproblems: Vec<AdpProblem>,
    pub witness: Witness,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub(crate) fn na<T>(msg: impl Into<String>) -> Result<T, ProcError> {
    Err(ProcError::NotApplicable(msg.into()))
}
