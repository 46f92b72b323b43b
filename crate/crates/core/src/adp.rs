//! Annotated dependency pairs and their rewrite relation.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::ptrs::{innermost_redexes_wrt, is_anf_wrt, MultiDistribution, Ptrs, Redex};
use crate::term::{Defined, Position, Subst, Symbol, Term, Var};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AdpId(pub u32);

impl fmt::Display for AdpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Adp {
    pub id: AdpId,
    pub lhs: Term,
    pub rhs: MultiDistribution,
    pub m: bool,
}

impl Adp {
    pub fn is_trivial(&self) -> bool {
        self.rhs.len() == 1 && self.rhs[0].0.is_one()
    }

    pub fn has_annotations(&self) -> bool {
        self.rhs.iter().any(|(_, r)| r.has_annotations())
    }

    /// Same ADP with all rhs annotations removed.
    pub fn flattened(&self) -> Adp {
        Adp { rhs: self.rhs.iter().map(|(p, r)| (p.clone(), r.flat())).collect(), ..self.clone() }
    }
}

impl fmt::Display for Adp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {{", self.lhs)?;
        for (i, (p, r)) in self.rhs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", p, r)?;
        }
        write!(f, "}}^{}", self.m)
    }
}

/// ⟨P, S⟩ with S given by ids.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdpProblem {
    pub adps: Vec<Adp>,
    pub s: BTreeSet<AdpId>,
}

impl AdpProblem {
    pub fn new(adps: Vec<Adp>, s: BTreeSet<AdpId>) -> Self {
        AdpProblem { adps, s }
    }

    /// ⟨P, P⟩.
    pub fn full(adps: Vec<Adp>) -> Self {
        let s = adps.iter().map(|a| a.id).collect();
        AdpProblem { adps, s }
    }

    pub fn is_solved(&self) -> bool {
        self.s.is_empty()
    }

    pub fn get(&self, id: AdpId) -> Option<&Adp> {
        self.adps.iter().find(|a| a.id == id)
    }

    pub fn defined(&self) -> Defined {
        defined_of(&self.adps)
    }

    pub fn lhss(&self) -> Vec<Term> {
        self.adps.iter().map(|a| a.lhs.clone()).collect()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for a in &self.adps {
            a.lhs.symbols(&mut out);
            a.rhs.iter().for_each(|(_, r)| r.symbols(&mut out));
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for a in &self.adps {
            a.lhs.collect_vars(&mut out);
        }
        out
    }

    pub fn next_id(&self) -> u32 {
        self.adps.iter().map(|a| a.id.0 + 1).max().unwrap_or(1)
    }
}

impl fmt::Display for AdpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.adps {
            let mark = if self.s.contains(&a.id) { "S" } else { " " };
            writeln!(f, "  {} {} {}", mark, a.id, a)?;
        }
        Ok(())
    }
}

pub fn defined_of(adps: &[Adp]) -> Defined {
    Defined(adps.iter().filter_map(|a| a.lhs.root().cloned()).collect())
}

/// DP(R): every defined rhs occurrence annotated, all flags true; ids count from 1.
pub fn canonical_adps(r: &Ptrs) -> Vec<Adp> {
    r.rules
        .iter()
        .enumerate()
        .map(|(i, rule)| Adp {
            id: AdpId(i as u32 + 1),
            lhs: rule.lhs.clone(),
            rhs: rule.rhs.iter().map(|(p, t)| (p.clone(), t.annotate_all_defined(r.defined()))).collect(),
            m: true,
        })
        .collect()
}

pub fn canonical_problem(r: &Ptrs) -> AdpProblem {
    AdpProblem::full(canonical_adps(r))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Case {
    At,
    Nt,
    Af,
    Nf,
}

impl Case {
    pub fn counts(self) -> bool {
        matches!(self, Case::At | Case::Af)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::At => "at",
            Case::Nt => "nt",
            Case::Af => "af",
            Case::Nf => "nf",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdpError {
    #[error("not a redex")]
    NotARedex,
    #[error("strategy violation: a proper subterm of the redex is reducible")]
    StrategyViolation,
    #[error("dt is only defined for ADPs with a single branch of probability 1: {0}")]
    DtShape(String),
}

/// One →_P step with ADP `adp` at `pos` using matcher σ.
pub fn adp_step(s: &Term, adps: &[Adp], pos: &Position, adp: &Adp, sigma: &Subst) -> Result<(MultiDistribution, Case), AdpError> {
    let sub = s.subterm_at(pos).map_err(|_| AdpError::NotARedex)?;
    if sub.is_var() || adp.lhs.apply(sigma) != sub.flat() {
        return Err(AdpError::NotARedex);
    }
    let lhss: Vec<Term> = adps.iter().map(|a| a.lhs.clone()).collect();
    if !is_anf_wrt(sub, &lhss) {
        return Err(AdpError::StrategyViolation);
    }
    let case = match (sub.is_annotated(), adp.m) {
        (true, true) => Case::At,
        (false, true) => Case::Nt,
        (true, false) => Case::Af,
        (false, false) => Case::Nf,
    };
    let dist = adp
        .rhs
        .iter()
        .map(|(p, r)| {
            let r = if sub.is_annotated() { r.apply(sigma) } else { r.flat().apply(sigma) };
            let t = s.replace_at(pos, r).expect("valid position");
            let t = if adp.m { t } else { t.flat_above(pos).expect("valid position") };
            (p.clone(), t)
        })
        .collect();
    Ok((dist, case))
}

/// All (position, ADP index, σ) applicable to `s` under →_P.
pub fn adp_redexes(s: &Term, adps: &[Adp]) -> Vec<Redex> {
    let lhss: Vec<Term> = adps.iter().map(|a| a.lhs.clone()).collect();
    innermost_redexes_wrt(s, &lhss)
}

/// A plain rewrite rule ℓ → r.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// np(P): ℓ → ♭(r_j) for every m=true ADP and branch.
pub fn np(adps: &[Adp]) -> Vec<Rule> {
    let mut out = Vec::new();
    for a in adps.iter().filter(|a| a.m) {
        for (_, r) in &a.rhs {
            let rule = Rule { lhs: a.lhs.clone(), rhs: r.flat() };
            if !out.contains(&rule) {
                out.push(rule);
            }
        }
    }
    out
}

/// A dependency pair ℓ# → t#, or ℓ# → ⊥ when `rhs` is None.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Dp {
    pub lhs: Term,
    pub rhs: Option<Term>,
}

impl fmt::Display for Dp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rhs {
            Some(r) => write!(f, "{} -> {}", self.lhs, r),
            None => write!(f, "{} -> ⊥", self.lhs),
        }
    }
}

/// dp(α): one DP per annotated subterm of each branch (duplicates within α merged).
pub fn dp(adp: &Adp) -> Vec<Dp> {
    let lhs = adp.lhs.with_root_flag(true);
    let mut out = Vec::new();
    for (_, r) in &adp.rhs {
        for (_, t) in r.annotated_subterms() {
            let d = Dp { lhs: lhs.clone(), rhs: Some(t.with_root_flag(true)) };
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

pub fn dp_bot(adp: &Adp) -> Vec<Dp> {
    let d = dp(adp);
    if d.is_empty() {
        vec![Dp { lhs: adp.lhs.with_root_flag(true), rhs: None }]
    } else {
        d
    }
}

pub fn dp_all(adps: &[Adp]) -> Vec<Dp> {
    let mut out = Vec::new();
    for a in adps {
        for d in dp(a) {
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

/// A dependency tuple ℓ# → [t1#, …, tn#], one entry per annotated position.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Dt {
    pub lhs: Term,
    pub rhs: Vec<Term>,
}

impl fmt::Display for Dt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rhs.iter().map(|t| t.to_string()).collect();
        write!(f, "{} -> [{}]", self.lhs, parts.join(", "))
    }
}

pub fn dt(adp: &Adp) -> Result<Dt, AdpError> {
    if !adp.is_trivial() {
        return Err(AdpError::DtShape(adp.to_string()));
    }
    let rhs = adp.rhs[0].1.annotated_subterms().into_iter().map(|(_, t)| t.with_root_flag(true)).collect();
    Ok(Dt { lhs: adp.lhs.with_root_flag(true), rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use crate::parse::{parse_ptrs, parse_term};
    use crate::systems;

    fn adp(lhs: &str, rhs: &str, m: bool) -> Adp {
        let vars = [Var::new("x")].into_iter().collect();
        let l = parse_term(lhs, &vars, &BTreeSet::new(), false).unwrap();
        let r = parse_term(rhs, &vars, &BTreeSet::new(), false).unwrap();
        Adp { id: AdpId(1), lhs: l, rhs: vec![(Rational::one(), r)], m }
    }

    #[test]
    fn canonical() {
        let r = parse_ptrs(systems::R1).unwrap();
        let adps = canonical_adps(&r);
        assert_eq!(adps[0].to_string(), "start(x,y) -> {1: q#(geo#(x),y,y)}^true");
        assert_eq!(adps[1].to_string(), "geo(x) -> {1/2: geo#(s(x)), 1/2: x}^true");
        assert_eq!(adps[4].to_string(), "q(0,s(y),s(z)) -> {1: 0}^true");
    }

    #[test]
    fn four_cases() {
        let vars: BTreeSet<Var> = [Var::new("x")].into_iter().collect();
        let s = parse_term("f#(s(f#(s(0))))", &vars, &BTreeSet::new(), false).unwrap();
        let a = adp("f(s(x))", "f#(c(x,x))", true);
        let pos = Position(vec![1, 1]);
        let sigma = Term::match_term(&a.lhs, s.subterm_at(&pos).unwrap()).unwrap();
        let (d, c) = adp_step(&s, std::slice::from_ref(&a), &pos, &a, &sigma).unwrap();
        assert_eq!((d[0].1.to_string(), c), ("f#(s(f#(c(0,0))))".to_string(), Case::At));
        let s2 = parse_term("f#(s(f(s(0))))", &vars, &BTreeSet::new(), false).unwrap();
        let (d, c) = adp_step(&s2, std::slice::from_ref(&a), &pos, &a, &sigma).unwrap();
        assert_eq!((d[0].1.to_string(), c), ("f#(s(f(c(0,0))))".to_string(), Case::Nt));
        let af = Adp { m: false, ..a.clone() };
        let (d, c) = adp_step(&s, std::slice::from_ref(&af), &pos, &af, &sigma).unwrap();
        assert_eq!((d[0].1.to_string(), c), ("f(s(f#(c(0,0))))".to_string(), Case::Af));
        let (d, c) = adp_step(&s2, std::slice::from_ref(&af), &pos, &af, &sigma).unwrap();
        assert_eq!((d[0].1.to_string(), c), ("f(s(f(c(0,0))))".to_string(), Case::Nf));
    }

    #[test]
    fn projections() {
        let a = adp("f(s(x))", "f#(c(x,x))", true);
        assert_eq!(dt(&a).unwrap().to_string(), "f#(s(x)) -> [f#(c(x,x))]");
        let r = parse_ptrs(systems::R1).unwrap();
        let mut adps = canonical_adps(&r);
        let dps = dp_all(&adps);
        assert_eq!(dps.len(), 5);
        assert_eq!(dp_bot(&adps[4])[0].to_string(), "q#(0,s(y),s(z)) -> ⊥");
        adps.iter_mut().for_each(|a| a.m = false);
        assert!(np(&adps).is_empty());
        assert!(dt(&adps[1]).is_err());
    }
}
