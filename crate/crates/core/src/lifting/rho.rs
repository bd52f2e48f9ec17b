use std::fmt;

use crate::value::Value;

/// First slot of a ρ-formula: whether `∅` is a neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rho0 {
    BoxBot,
    NegBoxBot,
}

/// Second slot of a ρ-formula: whether the whole set is a neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rho1 {
    BoxTop,
    NegBoxTop,
}

/// A pair `(ρ0, ρ1)`. The four formulas form the index set `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RhoFormula {
    pub rho0: Rho0,
    pub rho1: Rho1,
}

impl RhoFormula {
    /// All four formulas; position `i` is bit `i` of an `LJ` mask.
    pub const ALL: [RhoFormula; 4] = [
        RhoFormula { rho0: Rho0::BoxBot, rho1: Rho1::BoxTop },
        RhoFormula { rho0: Rho0::BoxBot, rho1: Rho1::NegBoxTop },
        RhoFormula { rho0: Rho0::NegBoxBot, rho1: Rho1::BoxTop },
        RhoFormula { rho0: Rho0::NegBoxBot, rho1: Rho1::NegBoxTop },
    ];

    pub fn index(&self) -> usize {
        RhoFormula::ALL.iter().position(|r| r == self).expect("listed")
    }

    pub fn bit(&self) -> u8 {
        1 << self.index()
    }

    /// The formulas selected by a 4-bit mask.
    pub fn from_mask(mask: u8) -> Vec<RhoFormula> {
        RhoFormula::ALL.into_iter().filter(|r| mask & r.bit() != 0).collect()
    }

    /// `(U, V) ⊩ ρ` for neighbourhood systems `U` over `x` and `V` over `y`.
    pub fn holds(&self, x: &Value, y: &Value, u: &Value, v: &Value) -> bool {
        let empty = Value::empty_set();
        let (bot_u, bot_v) = (u.has_element(&empty), v.has_element(&empty));
        let (top_u, top_v) = (u.has_element(x), v.has_element(y));
        let first = match self.rho0 {
            Rho0::BoxBot => !bot_u || bot_v,
            Rho0::NegBoxBot => bot_u || !bot_v,
        };
        let second = match self.rho1 {
            Rho1::BoxTop => !top_u || top_v,
            Rho1::NegBoxTop => top_u || !top_v,
        };
        first && second
    }
}

impl fmt::Display for RhoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.rho0 {
            Rho0::BoxBot => "□⊥",
            Rho0::NegBoxBot => "¬□⊥",
        };
        let b = match self.rho1 {
            Rho1::BoxTop => "□⊤",
            Rho1::NegBoxTop => "¬□⊤",
        };
        write!(f, "({a},{b})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_has_four_formulas() {
        let mut all = RhoFormula::ALL.to_vec();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 4);
        for (i, r) in RhoFormula::ALL.iter().enumerate() {
            assert_eq!(r.index(), i);
        }
        assert_eq!(RhoFormula::from_mask(0b0101).len(), 2);
        assert_eq!(RhoFormula::ALL[0].to_string(), "(□⊥,□⊤)");
    }

    #[test]
    fn satisfaction_clauses() {
        let x = Value::set([Value::atom(0)]);
        let bot_only = Value::set([Value::empty_set()]);
        let none = Value::empty_set();
        let r = RhoFormula::ALL[0];
        assert!(!r.holds(&x, &x, &bot_only, &none));
        assert!(r.holds(&x, &x, &none, &bot_only));
        let r = RhoFormula::ALL[3];
        assert!(r.holds(&x, &x, &bot_only, &none));
        assert!(!r.holds(&x, &x, &none, &bot_only));
    }
}
