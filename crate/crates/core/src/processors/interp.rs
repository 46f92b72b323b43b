//! Multilinear polynomial interpretations, RP constraints, and the complexity classifier.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::adp::{Adp, AdpId};
use crate::complexity::Complexity;
use crate::poly::{Atom, Monomial, Poly};
use crate::term::{Symbol, Term};
use crate::Rational;

/// A symbol together with its annotation flag: (f, true) is f♯.
pub type SymKey = (Symbol, bool);

/// A concrete interpretation; argument i of a symbol is the polynomial variable i (0-based).
/// Absent symbols are interpreted as 0.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Interpretation {
    pub polys: BTreeMap<SymKey, Poly<usize>>,
}

impl Interpretation {
    pub fn get(&self, key: &SymKey) -> Poly<usize> {
        self.polys.get(key).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn set(&mut self, sym: Symbol, annotated: bool, p: Poly<usize>) {
        if p.is_zero() {
            self.polys.remove(&(sym, annotated));
        } else {
            self.polys.insert((sym, annotated), p);
        }
    }

    pub fn to_template(&self) -> Template {
        Template {
            polys: self
                .polys
                .iter()
                .map(|(k, p)| (k.clone(), p.terms.iter().map(|(m, c)| (m.clone(), Poly::constant(c.clone()))).collect()))
                .collect(),
        }
    }

    /// I(t) with all flags ignored.
    pub fn eval(&self, t: &Term) -> Poly<Atom> {
        self.to_template().eval(t)
    }

    /// I(t♯).
    pub fn eval_sharp(&self, t: &Term) -> Poly<Atom> {
        self.to_template().eval_sharp(t)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ((sym, ann), p)) in self.polys.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let args: Vec<String> = (1..=sym.arity()).map(|i| format!("x{}", i)).collect();
            let head = if args.is_empty() { String::new() } else { format!("({})", args.join(",")) };
            let named: Poly<String> = p.substitute(&|v: &usize| Poly::var(format!("x{}", v + 1)));
            write!(f, "I[{}{}]{} = {}", sym.name(), if *ann { "#" } else { "" }, head, named)?;
        }
        Ok(())
    }
}

/// Polynomials whose coefficients are themselves polynomials (unknowns for a template,
/// constants for a concrete interpretation).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Template {
    pub polys: BTreeMap<SymKey, Vec<(Monomial<usize>, Poly<Atom>)>>,
}

impl Template {
    fn apply(&self, key: &SymKey, args: &[Term]) -> Poly<Atom> {
        let Some(mons) = self.polys.get(key) else { return Poly::zero() };
        let vals: Vec<Poly<Atom>> = args.iter().map(|a| self.eval(a)).collect();
        let mut out = Poly::zero();
        for (m, c) in mons {
            let mut t = c.clone();
            for (i, e) in m {
                for _ in 0..*e {
                    t = &t * &vals[*i];
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn eval(&self, t: &Term) -> Poly<Atom> {
        match t {
            Term::Var(v) => Poly::var(Atom::X(v.clone())),
            Term::App { sym, args, .. } => self.apply(&(sym.clone(), false), args),
        }
    }

    pub fn eval_sharp(&self, t: &Term) -> Poly<Atom> {
        match t {
            Term::Var(v) => Poly::var(Atom::X(v.clone())),
            Term::App { sym, args, .. } => self.apply(&(sym.clone(), true), args),
        }
    }

    /// I♯_Σ(r): one summand per annotated position.
    pub fn eval_sum(&self, r: &Term) -> Poly<Atom> {
        r.annotated_subterms().iter().fold(Poly::zero(), |acc, (_, t)| &acc + &self.eval_sharp(t))
    }

    /// Plugs values for the unknowns into a concrete interpretation.
    pub fn instantiate(&self, values: &BTreeMap<u32, i64>) -> Interpretation {
        let mut out = Interpretation::default();
        for ((sym, ann), mons) in &self.polys {
            let mut p: Poly<usize> = Poly::zero();
            for (m, c) in mons {
                let v = c.substitute(&|a: &Atom| match a {
                    Atom::U(u) => Poly::constant(Rational::from_integer(values.get(u).copied().unwrap_or(0).into())),
                    Atom::X(_) => Poly::var(a.clone()),
                });
                p.add_term(m.clone(), v.constant_term());
            }
            out.set(sym.clone(), *ann, p);
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum Condition {
    /// (1): I(ℓ) ≥ Σ p·I(♭ r).
    Rule,
    /// (2): I(ℓ♯) ≥ Σ p·I♯_Σ(r).
    Weak,
    /// (3): I(ℓ♯) > Σ p·I♯_Σ(r).
    Strict,
}

/// lhs − rhs of one RP inequality, as a polynomial in term variables and unknowns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffConstraint {
    pub adp: AdpId,
    pub condition: Condition,
    pub diff: Poly<Atom>,
}

pub fn gen_rp_constraints(adps: &[Adp], interp: &Template, strict: &BTreeSet<AdpId>) -> Vec<CoeffConstraint> {
    let mut out = Vec::new();
    for a in adps {
        if a.m {
            let rhs = a.rhs.iter().fold(Poly::zero(), |acc, (p, r)| &acc + &interp.eval(r).scale(p));
            out.push(CoeffConstraint { adp: a.id, condition: Condition::Rule, diff: &interp.eval(&a.lhs) - &rhs });
        }
        let rhs = a.rhs.iter().fold(Poly::zero(), |acc, (p, r)| &acc + &interp.eval_sum(r).scale(p));
        let condition = if strict.contains(&a.id) { Condition::Strict } else { Condition::Weak };
        out.push(CoeffConstraint { adp: a.id, condition, diff: &interp.eval_sharp(&a.lhs) - &rhs });
    }
    out
}

/// Absolute positiveness: every coefficient ≥ 0, and the constant > 0 when strict.
pub fn check_constraint(c: &CoeffConstraint) -> Result<(), String> {
    if c.diff.terms.keys().any(|m| m.iter().any(|(a, _)| matches!(a, Atom::U(_)))) {
        return Err(format!("{}: constraint still has unknowns", c.adp));
    }
    if let Some((m, k)) = c.diff.terms.iter().find(|(_, k)| **k < Rational::zero()) {
        return Err(format!("{}: coefficient {} of monomial {:?} is negative in {}", c.adp, k, m, c.diff));
    }
    if c.condition == Condition::Strict && c.diff.constant_term() <= Rational::zero() {
        return Err(format!("{}: no positive constant gap in {}", c.adp, c.diff));
    }
    Ok(())
}

/// Validates a concrete interpretation against ⟨P, S⟩ with the given strict set.
pub fn check_interpretation(adps: &[Adp], s: &BTreeSet<AdpId>, interp: &Interpretation, strict: &BTreeSet<AdpId>) -> Result<(), String> {
    if strict.is_disjoint(s) {
        return Err("no ADP of S is strict".into());
    }
    if !interp.polys.values().all(|p| p.is_multilinear() && p.is_nonneg()) {
        return Err("interpretation is not a nonnegative multilinear polynomial".into());
    }
    let t = interp.to_template();
    gen_rp_constraints(adps, &t, strict).iter().try_for_each(check_constraint)
}

/// The ADPs of S whose (3)-constraint holds under `interp`.
pub fn strict_adps(adps: &[Adp], s: &BTreeSet<AdpId>, interp: &Interpretation) -> BTreeSet<AdpId> {
    let t = interp.to_template();
    let all: BTreeSet<AdpId> = s.clone();
    gen_rp_constraints(adps, &t, &all)
        .into_iter()
        .filter(|c| c.condition == Condition::Strict && check_constraint(c).is_ok())
        .map(|c| c.adp)
        .collect()
}

/// Constructor polynomials of the form Σ aᵢ xᵢ + b with aᵢ ∈ {0,1}.
pub fn is_cpi(interp: &Interpretation, constructors: &BTreeSet<Symbol>) -> bool {
    interp.polys.iter().filter(|((f, ann), _)| !ann && constructors.contains(f)).all(|(_, p)| {
        p.terms.iter().all(|(m, c)| m.is_empty() || (m.len() == 1 && m[0].1 == 1 && c.is_one()))
    })
}

pub fn classify_interpretation(interp: &Interpretation, constructors: &BTreeSet<Symbol>) -> Complexity {
    if is_cpi(interp, constructors) {
        let deg = interp.polys.iter().filter(|((_, ann), _)| *ann).map(|(_, p)| p.degree()).max().unwrap_or(0);
        Complexity::Pol(deg)
    } else if interp.polys.iter().filter(|((f, ann), _)| !ann && constructors.contains(f)).all(|(_, p)| p.degree() <= 1) {
        Complexity::Exp
    } else {
        Complexity::TwoExp
    }
}
