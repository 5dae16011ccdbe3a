//! Laurent polynomials in the Lefschetz class `L`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::upoly::UPoly;
use crate::error::{Error, Result};

/// An element of `ℤ[L, L^-1]`: exponent → nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ClassPoly {
    terms: BTreeMap<i32, BigInt>,
}

impl ClassPoly {
    /// `c * L^k`.
    pub fn monomial(c: impl Into<BigInt>, k: i32) -> Self {
        Self::from_terms([(k, c.into())])
    }

    /// `L^k`.
    pub fn l_pow(k: i32) -> Self {
        Self::monomial(1, k)
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, BigInt)>) -> Self {
        let mut p = ClassPoly::default();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, k: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &BigInt)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn coeff(&self, k: i32) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// `true` for `±L^k`, the units of `ℤ[L, L^-1]`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().unwrap().abs().is_one()
    }

    /// Multiply by `L^k`.
    pub fn shift(&self, k: i32) -> Self {
        ClassPoly { terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, a)| (k, a * c)))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Substitute `L := q` exactly.
    pub fn eval(&self, q: &BigRational) -> Result<BigRational> {
        if q.is_zero() && self.min_exp().is_some_and(|k| k < 0) {
            return Err(Error::ZeroSubstitution);
        }
        let mut acc = BigRational::zero();
        for (&k, c) in &self.terms {
            acc += BigRational::from_integer(c.clone()) * pow_i32(q, k);
        }
        Ok(acc)
    }

    /// Integer value at an integer point, when the value is integral.
    pub fn eval_int(&self, q: u64) -> Result<BigRational> {
        self.eval(&BigRational::from_integer(q.into()))
    }

    /// Coefficients of `self * L^-min_exp` as an ordinary polynomial.
    fn shifted_upoly(&self) -> (i32, UPoly<BigRational>) {
        let lo = self.min_exp().unwrap_or(0);
        let top = self.max_exp().unwrap_or(0);
        let coeffs = (lo..=top)
            .map(|k| BigRational::from_integer(self.coeff(k)))
            .collect();
        (lo, UPoly::new(coeffs))
    }

    fn from_upoly_int(lo: i32, p: &UPoly<BigRational>) -> Option<Self> {
        let mut out = ClassPoly::default();
        for (i, c) in p.coeffs().iter().enumerate() {
            if !c.is_integer() {
                return None;
            }
            out.add_term(lo + i as i32, c.to_integer());
        }
        Some(out)
    }

    /// Unit-normal form: lowest exponent 0 and positive lowest coefficient.
    pub fn unit_normal(&self) -> (ClassPoly, ClassPoly) {
        match self.terms.iter().next() {
            None => (self.clone(), ClassPoly::one()),
            Some((&k, c)) => {
                let sign = if c.is_negative() { -1 } else { 1 };
                let unit = ClassPoly::monomial(sign, k);
                (self.shift(-k).scale(&BigInt::from(sign)), unit)
            }
        }
    }

    /// Greatest common divisor in `ℤ[L, L^-1]`, unit-normalized.
    pub fn gcd(&self, o: &ClassPoly) -> ClassPoly {
        if self.is_zero() {
            return o.unit_normal().0;
        }
        if o.is_zero() {
            return self.unit_normal().0;
        }
        let ca = self.content();
        let cb = o.content();
        let (_, pa) = self.shifted_upoly();
        let (_, pb) = o.shifted_upoly();
        let g = pa.gcd(&pb);
        // Clear denominators of the monic gcd and take its primitive part.
        let den = g
            .coeffs()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gi = ClassPoly::from_upoly_int(0, &g.scale(&BigRational::from_integer(den))).unwrap();
        let gi = gi.primitive();
        gi.scale(&ca.gcd(&cb)).unit_normal().0
    }

    /// Gcd of the integer coefficients (0 for the zero class).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    fn primitive(&self) -> ClassPoly {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        ClassPoly::from_terms(self.terms.iter().map(|(&k, a)| (k, a / &c)))
    }

    /// Exact quotient in `ℤ[L, L^-1]`, if it exists.
    pub fn div_exact(&self, d: &ClassPoly) -> Option<ClassPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ClassPoly::zero());
        }
        let (la, pa) = self.shifted_upoly();
        let (lb, pb) = d.shifted_upoly();
        let q = pa.div_exact(&pb)?;
        ClassPoly::from_upoly_int(la - lb, &q)
    }
}

fn pow_i32(q: &BigRational, k: i32) -> BigRational {
    let base = if k < 0 { q.recip() } else { q.clone() };
    num_traits::pow(base, k.unsigned_abs() as usize)
}

impl Zero for ClassPoly {
    fn zero() -> Self {
        ClassPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ClassPoly {
    fn one() -> Self {
        ClassPoly::from_int(1)
    }
}

impl<'a> Add<&'a ClassPoly> for &'a ClassPoly {
    type Output = ClassPoly;
    fn add(self, o: &ClassPoly) -> ClassPoly {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ClassPoly> for &'a ClassPoly {
    type Output = ClassPoly;
    fn sub(self, o: &ClassPoly) -> ClassPoly {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a ClassPoly> for &'a ClassPoly {
    type Output = ClassPoly;
    fn mul(self, o: &ClassPoly) -> ClassPoly {
        let mut out = ClassPoly::default();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &o.terms {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

impl Neg for &ClassPoly {
    type Output = ClassPoly;
    fn neg(self) -> ClassPoly {
        ClassPoly { terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect() }
    }
}

impl Add for ClassPoly {
    type Output = ClassPoly;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Sub for ClassPoly {
    type Output = ClassPoly;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Mul for ClassPoly {
    type Output = ClassPoly;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl Neg for ClassPoly {
    type Output = ClassPoly;
    fn neg(self) -> Self {
        -&self
    }
}

/// Writes one `c*L^k` factor string, without sign, for `|c|`.
pub(crate) fn l_factor(k: i32) -> Option<String> {
    match k {
        0 => None,
        1 => Some("L".to_string()),
        k => Some(format!("L^{k}")),
    }
}

impl fmt::Display for ClassPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&k, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            match (l_factor(k), abs.is_one()) {
                (None, _) => write!(f, "{abs}")?,
                (Some(l), true) => write!(f, "{l}")?,
                (Some(l), false) => write!(f, "{abs}*{l}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ClassPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn evaluates_at_q() {
        assert_eq!(ClassPoly::l_pow(7).eval(&q(2)).unwrap(), q(128));
        let p = &ClassPoly::l_pow(14) - &ClassPoly::l_pow(13);
        assert_eq!(p.eval(&q(2)).unwrap(), q(8192));
        assert_eq!(
            ClassPoly::l_pow(-1).eval(&q(2)).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(ClassPoly::l_pow(-1).eval(&q(0)), Err(Error::ZeroSubstitution));
    }

    #[test]
    fn renders_ascending() {
        let p = &ClassPoly::l_pow(7) - &ClassPoly::l_pow(6);
        assert_eq!(p.to_string(), "-L^6 + L^7");
        assert_eq!(ClassPoly::monomial(2, -1).to_string(), "2*L^-1");
        assert_eq!(ClassPoly::l_pow(1).to_string(), "L");
    }

    #[test]
    fn gcd_and_exact_division() {
        // (L - 1)(L + 2) L^-3 and 2 (L - 1) L
        let a = &(&ClassPoly::l_pow(1) - &ClassPoly::one())
            * &(&ClassPoly::l_pow(1) + &ClassPoly::from_int(2));
        let a = a.shift(-3);
        let b = ClassPoly::from_terms([(2, 2.into()), (1, (-2).into())]);
        let g = a.gcd(&b);
        assert_eq!(g, &ClassPoly::one() - &ClassPoly::l_pow(1));
        assert!(b.div_exact(&ClassPoly::from_int(3)).is_none());
        assert_eq!(b.div_exact(&g).unwrap(), ClassPoly::monomial(-2, 1));
    }

    #[test]
    fn unit_normal_strips_units() {
        let p = ClassPoly::from_terms([(-2, (-3).into()), (0, 1.into())]);
        let (n, u) = p.unit_normal();
        assert_eq!(n, ClassPoly::from_terms([(0, 3.into()), (2, (-1).into())]));
        assert_eq!(&n * &u, p);
    }
}
