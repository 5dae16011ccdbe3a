use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Largest modulus accepted; products of two residues fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// An element of the prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpElem {
    value: u64,
    modulus: u64,
}

impl FpElem {
    /// Reduces `value` into `[0, p)`. Panics if `p` is not a prime `<= 2^31`.
    pub fn new(value: i64, p: u64) -> Self {
        assert!(is_prime(p) && p <= MAX_MODULUS, "{p} is not a supported prime modulus");
        FpElem { value: value.rem_euclid(p as i64) as u64, modulus: p }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, o: Self) -> Result<()> {
        if self.modulus == o.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch(self.modulus, o.modulus))
        }
    }

    pub fn add(self, o: Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.with((self.value + o.value) % self.modulus))
    }

    pub fn sub(self, o: Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.with((self.value + self.modulus - o.value) % self.modulus))
    }

    pub fn mul(self, o: Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.with(self.value * o.value % self.modulus))
    }

    pub fn neg(self) -> Self {
        self.with((self.modulus - self.value) % self.modulus)
    }

    pub fn pow(self, e: u64) -> Self {
        self.with(pow_mod(self.value, e, self.modulus))
    }

    /// `None` for zero.
    pub fn inv(self) -> Option<Self> {
        (!self.is_zero()).then(|| self.with(inv_mod(self.value, self.modulus)))
    }

    fn with(self, value: u64) -> Self {
        FpElem { value, modulus: self.modulus }
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

pub fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Image of a rational number in `F_p`, if its denominator is a unit.
pub fn rational_mod(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = r.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = r.numer().mod_floor(&pb).to_u64()?;
    Some(num * inv_mod(den, p) % p)
}

/// Image of an integer in `F_p`.
pub fn int_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    (2..).filter(|&n| is_prime(n)).take(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_exist_for_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for a in 1..p {
                let x = FpElem::new(a as i64, p);
                assert_eq!(x.mul(x.inv().unwrap()).unwrap().value(), 1);
            }
            assert!(FpElem::new(0, p).inv().is_none());
        }
    }

    #[test]
    fn mixed_moduli_are_rejected() {
        let a = FpElem::new(1, 5);
        let b = FpElem::new(1, 7);
        assert_eq!(a.add(b), Err(Error::ModulusMismatch(5, 7)));
    }

    #[test]
    fn negative_values_wrap() {
        assert_eq!(FpElem::new(-8, 5).value(), 2);
        assert_eq!(first_primes(7), vec![2, 3, 5, 7, 11, 13, 17]);
    }
}
