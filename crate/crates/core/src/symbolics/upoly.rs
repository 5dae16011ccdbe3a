//! Dense univariate polynomials over an arbitrary coefficient ring.
//!
//! Used for `ℚ[L]` (inside [`LFrac`](super::LFrac)), for polynomials in `t`
//! with class coefficients (inside [`RationalFn`](super::RationalFn)), and for
//! `ℚ(x)[y]` in the squarefreeness check.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ring::{Field, Ring};

/// Coefficients are stored lowest degree first with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Ring> UPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UPoly { coeffs }
    }

    /// Drop all terms of degree `>= k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().take(k).cloned().collect())
    }

    pub fn eval(&self, z: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = C::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + C::one();
        }
        Self::new(out)
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> UPoly<D> {
        UPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<F: Field> UPoly<F> {
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = F::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient, or `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }
}

impl UPoly<BigRational> {
    /// Monic gcd through primitive pseudo-remainders over `ℤ`; Euclid over
    /// `ℚ` lets coefficient sizes explode.
    pub fn gcd_rational(&self, other: &Self) -> Self {
        let (ka, kb) = (low_order(self), low_order(other));
        let (a, b) = match (ka, kb) {
            (None, _) => return other.monic(),
            (_, None) => return self.monic(),
            (Some(ka), Some(kb)) => (self.unshift(ka), other.unshift(kb)),
        };
        let shift = ka.unwrap().min(kb.unwrap());
        let (mut a, mut b) = (primitive(&a.coeffs), primitive(&b.coeffs));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.len() > 1 {
            let r = primitive(&pseudo_rem(&a, &b));
            a = b;
            b = r;
        }
        let g = if b.is_empty() { a } else { vec![BigInt::one()] };
        UPoly::new(g.into_iter().map(BigRational::from_integer).collect()).shift(shift).monic()
    }

    fn unshift(&self, k: usize) -> Self {
        UPoly::new(self.coeffs[k..].to_vec())
    }
}

fn low_order(p: &UPoly<BigRational>) -> Option<usize> {
    p.coeffs.iter().position(|c| !c.is_zero())
}

/// Integer multiple of `p` with coprime coefficients.
fn primitive<C: Clone + Into<BigRational>>(p: &[C]) -> Vec<BigInt> {
    let p: Vec<BigRational> = p.iter().cloned().map(Into::into).collect();
    let den = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = if content.is_zero() { Vec::new() } else { ints.iter().map(|c| c / &content).collect() };
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap();
    while r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        let off = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[off + i] -= &lr * c;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

impl<C: Ring> Zero for UPoly<C> {
    fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<C: Ring> One for UPoly<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<'a, C: Ring> Add<&'a UPoly<C>> for &'a UPoly<C> {
    type Output = UPoly<C>;
    fn add(self, o: &UPoly<C>) -> UPoly<C> {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a, C: Ring> Sub<&'a UPoly<C>> for &'a UPoly<C> {
    type Output = UPoly<C>;
    fn sub(self, o: &UPoly<C>) -> UPoly<C> {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a, C: Ring> Mul<&'a UPoly<C>> for &'a UPoly<C> {
    type Output = UPoly<C>;
    fn mul(self, o: &UPoly<C>) -> UPoly<C> {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(out)
    }
}

impl<C: Ring> Neg for &UPoly<C> {
    type Output = UPoly<C>;
    fn neg(self) -> UPoly<C> {
        UPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<C: Ring> Add for UPoly<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<C: Ring> Sub for UPoly<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl<C: Ring> Mul for UPoly<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<C: Ring> Neg for UPoly<C> {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

impl<C: fmt::Debug> fmt::Debug for UPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}
