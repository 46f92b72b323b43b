//! Sparse polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::term::Var;
use crate::Rational;

/// A monomial as sorted (variable, exponent) pairs; empty is the constant monomial.
pub type Monomial<V> = Vec<(V, u32)>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<V: Ord + Clone> {
    pub terms: BTreeMap<Monomial<V>, Rational>,
}

fn mono_mul<V: Ord + Clone>(a: &Monomial<V>, b: &Monomial<V>) -> Monomial<V> {
    let mut m: BTreeMap<V, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *m.entry(v.clone()).or_insert(0) += e;
    }
    m.into_iter().collect()
}

impl<V: Ord + Clone> Poly<V> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn var(v: V) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![(v, 1)], Rational::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial<V>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|(_, e)| *e <= 1))
    }

    /// Every coefficient is nonnegative.
    pub fn is_nonneg(&self) -> bool {
        self.terms.values().all(|c| *c >= Rational::zero())
    }

    pub fn substitute<W: Ord + Clone>(&self, f: &impl Fn(&V) -> Poly<W>) -> Poly<W> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m {
                let p = f(v);
                for _ in 0..*e {
                    t = &t * &p;
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Splits into a polynomial over `outer` variables whose coefficients are polynomials over the rest.
    pub fn split<A: Ord + Clone, B: Ord + Clone>(&self, part: impl Fn(&V) -> Result<A, B>) -> BTreeMap<Monomial<A>, Poly<B>> {
        let mut out: BTreeMap<Monomial<A>, Poly<B>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut ma = Vec::new();
            let mut mb = Vec::new();
            for (v, e) in m {
                match part(v) {
                    Ok(a) => ma.push((a, *e)),
                    Err(b) => mb.push((b, *e)),
                }
            }
            ma.sort();
            mb.sort();
            out.entry(ma).or_insert_with(Poly::zero).add_term(mb, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

impl<V: Ord + Clone> Add for &Poly<V> {
    type Output = Poly<V>;
    fn add(self, o: &Poly<V>) -> Poly<V> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }
}

impl<V: Ord + Clone> Sub for &Poly<V> {
    type Output = Poly<V>;
    fn sub(self, o: &Poly<V>) -> Poly<V> {
        self + &(-o)
    }
}

impl<V: Ord + Clone> Neg for &Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl<V: Ord + Clone> Mul for &Poly<V> {
    type Output = Poly<V>;
    fn mul(self, o: &Poly<V>) -> Poly<V> {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        r
    }
}

impl<V: Ord + Clone + fmt::Display> fmt::Display for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest degree first, constant last.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|(_, e)| e).sum();
            let db: u32 = b.0.iter().map(|(_, e)| e).sum();
            db.cmp(&da).then(a.0.cmp(b.0))
        });
        for (i, (m, c)) in items.into_iter().enumerate() {
            let neg = *c < Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> =
                m.iter().map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{}^{}", v, e) }).collect();
            if m.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Variables of constraint polynomials: term variables and unknown coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    X(Var),
    U(u32),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::X(v) => write!(f, "{}", v),
            Atom::U(i) => write!(f, "c{}", i),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn arithmetic() {
        let x: Poly<u32> = Poly::var(0);
        let y: Poly<u32> = Poly::var(1);
        let p = &(&x + &Poly::one()) * &(&x + &y);
        assert_eq!(p.to_string(), "x0*x1 + x0^2 + x0 + x1".replace("x0", "0").replace("x1", "1"));
        assert_eq!(p.degree(), 2);
        assert!(!p.is_multilinear());
        let q = &p - &p;
        assert!(q.is_zero());
        let s = x.substitute(&|_| &Poly::var(5u32) + &Poly::constant(rat(1, 2)));
        assert_eq!(s.constant_term(), rat(1, 2));
    }
}
