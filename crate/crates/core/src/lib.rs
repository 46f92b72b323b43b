//! Upper bounds on the expected innermost runtime complexity of probabilistic
//! term rewrite systems, via annotated dependency pairs.
//!
//! The pipeline: [`parse::parse_ptrs`] reads a system, [`adp::canonical_problem`]
//! builds the initial ADP problem, [`strategy::solve`] grows a [`proof::ProofNode`]
//! tree, and [`proof::ProofNode::bound`] reads off the complexity.

pub mod adp;
pub mod chain;
pub mod complexity;
pub mod oracle;
pub mod parse;
pub mod poly;
pub mod processors;
pub mod proof;
pub mod ptrs;
pub mod strategy;
pub mod systems;
pub mod term;

pub type Rational = num_rational::BigRational;

/// Small-integer rational helper.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
