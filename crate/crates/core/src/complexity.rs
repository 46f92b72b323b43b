//! The lattice Pol_0 ⊏ Pol_1 ⊏ … ⊏ Exp ⊏ 2-Exp ⊏ Fin ⊏ ω.

use std::fmt;
use std::str::FromStr;

/// Variant order is the lattice order, so the derived `Ord` is ⊑.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Complexity {
    Pol(u32),
    Exp,
    TwoExp,
    Fin,
    Omega,
}

impl Complexity {
    pub const ZERO: Complexity = Complexity::Pol(0);

    pub fn le(self, other: Complexity) -> bool {
        self <= other
    }

    pub fn oplus(self, other: Complexity) -> Complexity {
        self.max(other)
    }

    /// c ⊖ d = c if d ⊏ c, else Pol_0.
    pub fn ominus(self, other: Complexity) -> Complexity {
        if other < self {
            self
        } else {
            Complexity::ZERO
        }
    }
}

pub fn cplx_le(c: Complexity, d: Complexity) -> bool {
    c.le(d)
}

pub fn oplus(c: Complexity, d: Complexity) -> Complexity {
    c.oplus(d)
}

pub fn ominus(c: Complexity, d: Complexity) -> Complexity {
    c.ominus(d)
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Complexity::Pol(a) => write!(f, "Pol_{}", a),
            Complexity::Exp => f.write_str("EXP"),
            Complexity::TwoExp => f.write_str("2-EXP"),
            Complexity::Fin => f.write_str("FIN"),
            Complexity::Omega => f.write_str("OMEGA"),
        }
    }
}

impl FromStr for Complexity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EXP" => Ok(Complexity::Exp),
            "2-EXP" => Ok(Complexity::TwoExp),
            "FIN" => Ok(Complexity::Fin),
            "OMEGA" => Ok(Complexity::Omega),
            _ => s
                .strip_prefix("Pol_")
                .and_then(|a| a.parse().ok())
                .map(Complexity::Pol)
                .ok_or_else(|| format!("unknown complexity '{}'", s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Complexity::*;

    #[test]
    fn lattice() {
        assert_eq!(oplus(Pol(2), Pol(1)), Pol(2));
        assert_eq!(ominus(Pol(1), Pol(2)), Pol(0));
        assert_eq!(ominus(Pol(2), Pol(1)), Pol(2));
        assert!(cplx_le(Pol(7), Exp) && cplx_le(Exp, TwoExp) && cplx_le(TwoExp, Fin) && cplx_le(Fin, Omega));
        for c in [Pol(0), Pol(3), Exp, TwoExp, Fin, Omega] {
            assert_eq!(oplus(c, Pol(0)), c);
            assert_eq!(c.to_string().parse::<Complexity>().unwrap(), c);
        }
    }
}
