//! Probabilistic term rewrite systems and innermost probabilistic rewriting.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::term::{Defined, Position, Subst, Symbol, Term, Var};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PtrsError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("probability error at {line}:{col}: probabilities sum to {sum}, not 1")]
    ProbabilitySum { line: usize, col: usize, sum: String },
    #[error("probability error at {line}:{col}: {msg}")]
    Probability { line: usize, col: usize, msg: String },
    #[error("free variable error at {line}:{col}: variable {var} does not occur in the left-hand side")]
    FreeVariable { line: usize, col: usize, var: String },
    #[error("left-hand side error at {line}:{col}: left-hand side is a variable")]
    LhsVariable { line: usize, col: usize },
    #[error("arity mismatch at {line}:{col} for '{symbol}': {msg}")]
    Arity { symbol: String, line: usize, col: usize, msg: String },
}

impl PtrsError {
    /// Fills in a source location for errors raised without one.
    pub fn at(self, l: usize, c: usize) -> Self {
        match self {
            PtrsError::ProbabilitySum { sum, .. } => PtrsError::ProbabilitySum { line: l, col: c, sum },
            PtrsError::FreeVariable { var, .. } => PtrsError::FreeVariable { line: l, col: c, var },
            PtrsError::LhsVariable { .. } => PtrsError::LhsVariable { line: l, col: c },
            PtrsError::Arity { symbol, msg, .. } => PtrsError::Arity { symbol, line: l, col: c, msg },
            other => other,
        }
    }
}

/// A finite multi-distribution; duplicates are kept.
pub type MultiDistribution = Vec<(Rational, Term)>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbRule {
    pub lhs: Term,
    pub rhs: MultiDistribution,
}

impl ProbRule {
    pub fn new(lhs: Term, rhs: MultiDistribution) -> Result<Self, PtrsError> {
        if lhs.is_var() {
            return Err(PtrsError::LhsVariable { line: 0, col: 0 });
        }
        let sum: Rational = rhs.iter().map(|(p, _)| p.clone()).sum();
        if sum != Rational::one() {
            return Err(PtrsError::ProbabilitySum { line: 0, col: 0, sum: sum.to_string() });
        }
        if rhs.iter().any(|(p, _)| *p <= Rational::zero()) {
            return Err(PtrsError::Probability { line: 0, col: 0, msg: "probabilities must be positive".into() });
        }
        let lv = lhs.vars();
        for (_, r) in &rhs {
            if let Some(v) = r.vars().difference(&lv).next() {
                return Err(PtrsError::FreeVariable { line: 0, col: 0, var: v.to_string() });
            }
        }
        Ok(ProbRule { lhs, rhs })
    }

    pub fn is_trivial(&self) -> bool {
        self.rhs.len() == 1
    }
}

impl fmt::Display for ProbRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.lhs)?;
        write_distribution(f, &self.rhs)
    }
}

pub(crate) fn write_distribution(f: &mut fmt::Formatter<'_>, d: &MultiDistribution) -> fmt::Result {
    if d.len() == 1 && d[0].0.is_one() {
        return write!(f, "{}", d[0].1);
    }
    f.write_str("{")?;
    for (i, (p, t)) in d.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}: {}", p, t)?;
    }
    f.write_str("}")
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ptrs {
    pub vars: BTreeSet<Var>,
    pub rules: Vec<ProbRule>,
    defined: Defined,
    symbols: BTreeSet<Symbol>,
}

impl Ptrs {
    pub fn new(vars: BTreeSet<Var>, rules: Vec<ProbRule>) -> Result<Self, PtrsError> {
        let mut symbols = BTreeSet::new();
        for r in &rules {
            r.lhs.symbols(&mut symbols);
            r.rhs.iter().for_each(|(_, t)| t.symbols(&mut symbols));
        }
        let mut seen = std::collections::BTreeMap::new();
        for s in &symbols {
            if let Some(k) = seen.insert(s.name().to_string(), s.arity()) {
                return Err(PtrsError::Arity {
                    symbol: s.name().to_string(),
                    line: 0,
                    col: 0,
                    msg: format!("used with arities {} and {}", k, s.arity()),
                });
            }
        }
        let defined = Defined(rules.iter().filter_map(|r| r.lhs.root().cloned()).collect());
        Ok(Ptrs { vars, rules, defined, symbols })
    }

    pub fn defined(&self) -> &Defined {
        &self.defined
    }

    pub fn defined_symbols(&self) -> &BTreeSet<Symbol> {
        &self.defined.0
    }

    pub fn symbols(&self) -> &BTreeSet<Symbol> {
        &self.symbols
    }

    pub fn constructors(&self) -> BTreeSet<Symbol> {
        self.symbols.difference(&self.defined.0).cloned().collect()
    }

    pub fn lhss(&self) -> Vec<Term> {
        self.rules.iter().map(|r| r.lhs.clone()).collect()
    }

    pub fn is_nf(&self, t: &Term) -> bool {
        is_nf_wrt(t, &self.lhss())
    }

    pub fn is_anf(&self, t: &Term) -> bool {
        t.args().iter().all(|a| self.is_nf(a))
    }

    pub fn is_basic(&self, t: &Term) -> bool {
        match t.root() {
            Some(f) if self.defined.contains(f) => t.args().iter().all(|a| self.is_constructor_term(a)),
            _ => false,
        }
    }

    pub fn is_constructor_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App { sym, args, .. } => !self.defined.contains(sym) && args.iter().all(|a| self.is_constructor_term(a)),
        }
    }

    /// All innermost redexes (π, rule index, σ) in leftmost-outermost order.
    pub fn innermost_redexes(&self, t: &Term) -> Vec<Redex> {
        innermost_redexes_wrt(t, &self.lhss())
    }

    pub fn step(&self, t: &Term, redex: &Redex) -> Result<MultiDistribution, RewriteError> {
        let rule = self.rules.get(redex.rule).ok_or(RewriteError::NotARedex)?;
        let sub = t.subterm_at(&redex.pos).map_err(|_| RewriteError::NotARedex)?;
        if rule.lhs.apply(&redex.sigma) != sub.flat() {
            return Err(RewriteError::NotARedex);
        }
        if !self.is_anf(sub) {
            return Err(RewriteError::StrategyViolation);
        }
        Ok(rule
            .rhs
            .iter()
            .map(|(p, r)| (p.clone(), t.replace_at(&redex.pos, r.apply(&redex.sigma)).expect("valid position")))
            .collect())
    }
}

impl fmt::Display for Ptrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<&str> = self.vars.iter().map(|v| v.name()).collect();
        writeln!(f, "(VAR {})", vars.join(" "))?;
        writeln!(f, "(RULES")?;
        for r in &self.rules {
            writeln!(f, "  {}", r)?;
        }
        writeln!(f, ")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("not a redex")]
    NotARedex,
    #[error("strategy violation: a proper subterm of the redex is reducible")]
    StrategyViolation,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Redex {
    pub pos: Position,
    pub rule: usize,
    pub sigma: Subst,
}

pub fn is_nf_wrt(t: &Term, lhss: &[Term]) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App { args, .. } => args.iter().all(|a| is_nf_wrt(a, lhss)) && !lhss.iter().any(|l| Term::matches(l, t)),
    }
}

pub fn is_anf_wrt(t: &Term, lhss: &[Term]) -> bool {
    t.args().iter().all(|a| is_nf_wrt(a, lhss))
}

/// Positions π, indices i and matchers σ with ♭(t|π) = lhss[i]σ in argument normal form.
pub fn innermost_redexes_wrt(t: &Term, lhss: &[Term]) -> Vec<Redex> {
    fn go(t: &Term, lhss: &[Term], path: &mut Vec<usize>, out: &mut Vec<Redex>) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App { args, .. } => {
                let mut args_nf = true;
                for (i, a) in args.iter().enumerate() {
                    path.push(i + 1);
                    args_nf &= go(a, lhss, path, out);
                    path.pop();
                }
                if !args_nf {
                    return false;
                }
                let mut nf = true;
                for (i, l) in lhss.iter().enumerate() {
                    if let Some(sigma) = Term::match_term(l, t) {
                        out.push(Redex { pos: Position(path.clone()), rule: i, sigma });
                        nf = false;
                    }
                }
                nf
            }
        }
    }
    let mut out = Vec::new();
    go(t, lhss, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.pos.cmp(&b.pos));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ptrs;
    use crate::systems;

    #[test]
    fn normal_forms_and_basic_terms() {
        let r = parse_ptrs(systems::R_Q).unwrap();
        let t = |s: &str| crate::parse::parse_term(s, &r.vars, r.symbols(), false).unwrap();
        assert!(r.is_anf(&t("start(s(0),s(0))")));
        assert!(!r.is_anf(&t("start(start(0,0),s(0))")));
        assert!(!r.is_basic(&t("q(q(0,x,x),x,x)")));
        assert!(r.is_basic(&t("q(0,x,x)")));
        assert!(r.is_nf(&t("s(0)")));
    }

    #[test]
    fn innermost_only() {
        let r = parse_ptrs(systems::R_Q).unwrap();
        let t = |s: &str| crate::parse::parse_term(s, &r.vars, r.symbols(), false).unwrap();
        let red = r.innermost_redexes(&t("start(s(0),s(0))"));
        assert_eq!(red.len(), 1);
        assert!(red[0].pos.is_root());
        assert!(r.innermost_redexes(&t("0")).is_empty());
        let red = r.innermost_redexes(&t("start(start(0,0),s(0))"));
        assert_eq!(red.len(), 1);
        assert_eq!(red[0].pos, Position(vec![1]));
    }

    #[test]
    fn steps() {
        let r = parse_ptrs(systems::R_GEO).unwrap();
        let t = crate::parse::parse_term("geo(0)", &r.vars, r.symbols(), false).unwrap();
        let red = r.innermost_redexes(&t);
        let d = r.step(&t, &red[0]).unwrap();
        let shown: Vec<String> = d.iter().map(|(p, t)| format!("{}:{}", p, t)).collect();
        assert_eq!(shown, ["1/2:geo(s(0))", "1/2:0"]);
        let bogus = Redex { pos: Position::root(), rule: 0, sigma: Subst::new() };
        assert_eq!(r.step(&t, &bogus), Err(RewriteError::NotARedex));
    }

    #[test]
    fn render_round_trip() {
        for src in [systems::R_GEO, systems::R_Q, systems::R1, systems::R2, systems::R_ROI, systems::R_PLUS] {
            let p = parse_ptrs(src).unwrap();
            assert_eq!(parse_ptrs(&p.to_string()).unwrap(), p);
        }
    }
}
