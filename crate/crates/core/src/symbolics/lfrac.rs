//! The fraction field `ℚ(L)`, used for exact Padé solving and series division.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::classpoly::ClassPoly;
use super::ring::Field;
use super::upoly::UPoly;

type QPoly = UPoly<BigRational>;

/// `num / den` with `den` monic and coprime to `num`.
#[derive(Clone, PartialEq, Eq)]
pub struct LFrac {
    num: QPoly,
    den: QPoly,
}

impl LFrac {
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Q(L)");
        if num.is_zero() {
            return LFrac::zero();
        }
        let g = num.gcd_rational(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().unwrap().clone();
        let inv = BigRational::one() / lead;
        LFrac { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    /// Degree weight used for pivot selection.
    pub fn weight(&self) -> usize {
        self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0)
    }

    pub fn from_class(c: &ClassPoly) -> Self {
        let lo = c.min_exp().unwrap_or(0);
        let hi = c.max_exp().unwrap_or(0);
        let coeffs: Vec<BigRational> = (lo.min(0)..=hi)
            .map(|k| BigRational::from_integer(c.coeff(k)))
            .collect();
        let num = QPoly::new(coeffs);
        let den = QPoly::monomial(BigRational::one(), (-lo).max(0) as usize);
        LFrac::new(num, den)
    }

    /// Back to `ℤ[L, L^-1]` when the denominator is a power of `L` and the
    /// numerator has integer coefficients.
    pub fn to_class(&self) -> Option<ClassPoly> {
        let k = self.den.degree().unwrap_or(0);
        if self.den != QPoly::monomial(BigRational::one(), k) {
            return None;
        }
        let mut terms = Vec::new();
        for (i, c) in self.num.coeffs().iter().enumerate() {
            if !c.is_integer() {
                return None;
            }
            terms.push((i as i32 - k as i32, c.to_integer()));
        }
        Some(ClassPoly::from_terms(terms))
    }

    /// Lcm of coefficient denominators across numerator and denominator,
    /// together with the polynomial denominator.
    pub(crate) fn integer_denominator(&self) -> BigInt {
        self.num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl Zero for LFrac {
    fn zero() -> Self {
        LFrac { num: QPoly::zero(), den: QPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for LFrac {
    fn one() -> Self {
        LFrac { num: QPoly::one(), den: QPoly::one() }
    }
}

impl Add for LFrac {
    type Output = LFrac;
    fn add(self, o: Self) -> Self {
        if self.den == o.den {
            return LFrac::new(&self.num + &o.num, self.den);
        }
        LFrac::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for LFrac {
    type Output = LFrac;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for LFrac {
    type Output = LFrac;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return LFrac::zero();
        }
        LFrac::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for LFrac {
    type Output = LFrac;
    fn div(self, o: Self) -> Self {
        assert!(!o.is_zero(), "division by zero in Q(L)");
        LFrac::new(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for LFrac {
    type Output = LFrac;
    fn neg(self) -> Self {
        LFrac { num: -&self.num, den: self.den }
    }
}

impl Field for LFrac {}

impl fmt::Debug for LFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_round_trip() {
        let c = ClassPoly::from_terms([(-1, 1.into()), (2, (-3).into())]);
        let f = LFrac::from_class(&c);
        assert_eq!(f.to_class().unwrap(), c);
    }

    #[test]
    fn field_arithmetic() {
        let l = LFrac::from_class(&ClassPoly::l_pow(1));
        let one = LFrac::one();
        let inv = one.clone() / (one.clone() - l.clone());
        // (1 - L) * 1/(1 - L) = 1
        assert_eq!((one.clone() - l) * inv.clone(), one);
        assert!(inv.to_class().is_none());
    }
}
