//! The reduction pair processor: template search for multilinear interpretations.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::adp::{AdpId, AdpProblem};
use crate::complexity::Complexity;
use crate::poly::{Atom, Monomial, Poly};
use crate::term::{Symbol, Var};

use super::interp::{check_interpretation, classify_interpretation, gen_rp_constraints, strict_adps, Condition, Interpretation, Template};
use super::smt::{solve_smt, SmtConfig};
use super::solver::{solve_csp, CspConfig, CspOutcome, CspProblem, IntPoly};
use super::{na, ProcError, Processor, ProcessorResult, Witness};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TemplateKind {
    /// CPI with constant polynomials for annotated symbols.
    CpiConstant,
    /// CPI, every symbol linear.
    CpiLinear,
    /// CPI constructors, multilinear elsewhere.
    CpiMultilinear,
    /// Multilinear everywhere, constructors included.
    Multilinear,
}

impl TemplateKind {
    pub const CPI: [TemplateKind; 3] = [TemplateKind::CpiConstant, TemplateKind::CpiLinear, TemplateKind::CpiMultilinear];
    pub const NON_CPI: [TemplateKind; 1] = [TemplateKind::Multilinear];
}

#[derive(Clone, Debug)]
pub struct RpConfig {
    pub max_coeff: i64,
    pub csp: CspConfig,
    pub smt: Option<SmtConfig>,
}

impl Default for RpConfig {
    fn default() -> Self {
        RpConfig { max_coeff: 3, csp: CspConfig::default(), smt: None }
    }
}

impl RpConfig {
    pub fn with_deadline(&self, deadline: Option<Instant>) -> Self {
        RpConfig { csp: CspConfig { deadline, ..self.csp.clone() }, ..self.clone() }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Synthesis {
    pub interpretation: Interpretation,
    pub strict: BTreeSet<AdpId>,
    pub complexity: Complexity,
}

/// Argument subsets used as monomials for a symbol of the given arity.
fn monomials(arity: usize, max_deg: usize) -> Vec<Monomial<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << arity) {
        if mask.count_ones() as usize <= max_deg {
            out.push((0..arity).filter(|i| mask & (1 << i) != 0).map(|i| (i, 1)).collect());
        }
    }
    out.sort_by_key(|m: &Monomial<usize>| m.len());
    out
}

pub fn build_template(symbols: &BTreeSet<Symbol>, defined: &BTreeSet<Symbol>, kind: TemplateKind, max_coeff: i64) -> (Template, Vec<(i64, i64)>) {
    let mut t = Template::default();
    let mut domains = Vec::new();
    let mut add = |key: (Symbol, bool), mons: Vec<Monomial<usize>>, unit_linear: bool| {
        let coeffs = mons
            .into_iter()
            .map(|m| {
                let hi = if unit_linear && !m.is_empty() { 1 } else { max_coeff };
                domains.push((0, hi));
                (m, Poly::var(Atom::U(domains.len() as u32 - 1)))
            })
            .collect();
        t.polys.insert(key, coeffs);
    };
    for f in symbols {
        let k = f.arity();
        let ml = if k <= 3 { k } else { 2 };
        let is_cons = !defined.contains(f);
        let (mons, unit) = match kind {
            TemplateKind::Multilinear => (monomials(k, ml), false),
            _ if is_cons => (monomials(k, 1), true),
            TemplateKind::CpiMultilinear => (monomials(k, ml), false),
            _ => (monomials(k, 1), false),
        };
        add((f.clone(), false), mons, unit);
        if !is_cons {
            let sharp = match kind {
                TemplateKind::CpiConstant => monomials(k, 0),
                TemplateKind::CpiLinear => monomials(k, 1),
                _ => monomials(k, ml),
            };
            add((f.clone(), true), sharp, false);
        }
    }
    (t, domains)
}

/// Scales a polynomial over unknowns by the lcm of its denominators.
fn to_int_poly(p: &Poly<u32>) -> Option<IntPoly> {
    let d = p.terms.values().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut terms = Vec::new();
    for (m, c) in &p.terms {
        let k = (c * crate::Rational::from_integer(d.clone())).to_integer().to_i64()?;
        let us = m.iter().flat_map(|(u, e)| std::iter::repeat(*u as usize).take(*e as usize)).collect();
        terms.push((k, us));
    }
    Some(IntPoly { terms })
}

/// Encodes the coefficient-wise constraints; the second component maps strict candidates to ADPs.
pub fn encode(problem: &AdpProblem, template: &Template, domains: &[(i64, i64)]) -> Option<(CspProblem, Vec<AdpId>)> {
    let cs = gen_rp_constraints(&problem.adps, template, &problem.s);
    let mut csp = CspProblem { domains: domains.to_vec(), constraints: Vec::new(), strict: Vec::new(), min_strict: 1 };
    let mut owners = Vec::new();
    for c in cs {
        let parts: BTreeMap<Monomial<Var>, Poly<u32>> = c.diff.split(|a| match a {
            Atom::X(v) => Ok(v.clone()),
            Atom::U(u) => Err(*u),
        });
        for q in parts.values() {
            csp.constraints.push(to_int_poly(q)?);
        }
        if c.condition == Condition::Strict {
            let q = parts.get(&Vec::new()).cloned().unwrap_or_else(Poly::zero);
            csp.strict.push(to_int_poly(&q)?);
            owners.push(c.adp);
        }
    }
    csp.constraints.retain(|c| !c.terms.iter().all(|(k, m)| m.is_empty() && *k >= 0));
    Some((csp, owners))
}

pub fn constructors_of(problem: &AdpProblem) -> BTreeSet<Symbol> {
    let defined = problem.defined().0;
    problem.symbols().into_iter().filter(|f| !defined.contains(f)).collect()
}

pub fn synthesize(problem: &AdpProblem, cfg: &RpConfig, kind: TemplateKind) -> Option<Synthesis> {
    if problem.s.is_empty() {
        return None;
    }
    let defined = problem.defined().0;
    let (template, domains) = build_template(&problem.symbols(), &defined, kind, cfg.max_coeff);
    let (csp, _) = encode(problem, &template, &domains)?;
    let outcome = match &cfg.smt {
        Some(smt) => solve_smt(&csp, smt),
        None => solve_csp(&csp, &cfg.csp),
    };
    let CspOutcome::Solved { values, .. } = outcome else { return None };
    let values: BTreeMap<u32, i64> = values.into_iter().enumerate().map(|(u, v)| (u as u32, v)).collect();
    let interpretation = template.instantiate(&values);
    let strict = strict_adps(&problem.adps, &problem.s, &interpretation);
    check_interpretation(&problem.adps, &problem.s, &interpretation, &strict).ok()?;
    let complexity = classify_interpretation(&interpretation, &constructors_of(problem));
    Some(Synthesis { interpretation, strict, complexity })
}

pub fn proc_rp(problem: &AdpProblem, cfg: &RpConfig, kinds: &[TemplateKind]) -> Result<ProcessorResult, ProcError> {
    for &kind in kinds {
        if cfg.csp.deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        if let Some(syn) = synthesize(problem, cfg, kind) {
            return Ok(rp_result(problem, syn));
        }
    }
    na("no interpretation found")
}

pub(crate) fn rp_result(problem: &AdpProblem, syn: Synthesis) -> ProcessorResult {
    let s = problem.s.difference(&syn.strict).copied().collect();
    ProcessorResult {
        processor: Processor::Rp,
        complexity: syn.complexity,
        subproblems: vec![AdpProblem::new(problem.adps.clone(), s)],
        witness: Witness::ReductionPair { interpretation: syn.interpretation, strict: syn.strict },
    }
}

/// Degree 0 only when the interpretation is nonzero somewhere; used in tests.
pub fn is_trivially_zero(i: &Interpretation) -> bool {
    i.polys.values().all(|p| p.terms.values().all(Zero::is_zero))
}
