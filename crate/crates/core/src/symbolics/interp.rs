use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::classpoly::ClassPoly;
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// Result of fitting point counts with a polynomial in `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFit {
    pub class: ClassPoly,
    /// `true` iff there were at least `degree_bound + 1` samples.
    pub certain: bool,
}

/// Polynomial in `L` with integer coefficients and degree at most
/// `degree_bound` that takes the value `count` at `L = q` for every sample.
///
/// The largest power `L^a` with `q^a` dividing every count is split off
/// first and the cofactor is fitted with least degree. With more samples
/// than the bound the answer is unique either way; with fewer, this prefers
/// `L^a * g` over a dense interpolant.
pub fn interpolate_class_poly(samples: &[(u64, BigInt)], degree_bound: usize) -> Result<ClassFit> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("interpolation needs at least two samples".into()));
    }
    for (i, a) in samples.iter().enumerate() {
        if samples[..i].iter().any(|b| b.0 == a.0) {
            return Err(Error::InvalidArgument(format!("sample point {} repeated", a.0)));
        }
    }
    let a = samples.iter().map(|(q, v)| valuation(v, *q)).min().unwrap_or(0).min(degree_bound);
    let certain = samples.len() > degree_bound;
    for shift in [a, 0] {
        let pts: Vec<(BigRational, BigRational)> = samples
            .iter()
            .map(|(q, v)| {
                let scale = BigInt::from(*q).pow(shift as u32);
                (BigRational::from_integer((*q).into()), BigRational::from_integer(v / scale))
            })
            .collect();
        if let Some(p) = least_integer_fit(&pts, degree_bound - shift) {
            let class = ClassPoly::from_terms(
                p.coeffs().iter().enumerate().map(|(i, c)| ((i + shift) as i32, c.to_integer())),
            );
            return Ok(ClassFit { class, certain });
        }
        if shift == 0 {
            break;
        }
    }
    Err(Error::NotPolynomialCount { bound: degree_bound })
}

/// Exponent of `q` in `v`, unbounded for zero.
fn valuation(v: &BigInt, q: u64) -> usize {
    if v.is_zero() {
        return usize::MAX;
    }
    let q = BigInt::from(q);
    let (mut v, mut k) = (v.clone(), 0);
    while (&v % &q).is_zero() {
        v /= &q;
        k += 1;
    }
    k
}

fn least_integer_fit(pts: &[(BigRational, BigRational)], bound: usize) -> Option<UPoly<BigRational>> {
    let top = bound.min(pts.len() - 1);
    (0..=top).find_map(|deg| {
        let p = newton_interpolate(&pts[..=deg]);
        (p.coeffs().iter().all(|c| c.is_integer()) && pts.iter().all(|(x, y)| &p.eval(x) == y)).then_some(p)
    })
}

fn newton_interpolate(pts: &[(BigRational, BigRational)]) -> UPoly<BigRational> {
    let n = pts.len();
    let mut dd: Vec<BigRational> = pts.iter().map(|p| p.1.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&pts[i].0 - &pts[i - level].0);
        }
    }
    let mut acc = UPoly::<BigRational>::zero();
    for i in (0..n).rev() {
        let factor = UPoly::new(vec![-pts[i].0.clone(), BigRational::one()]);
        acc = &(&acc * &factor) + &UPoly::constant(dd[i].clone());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[(u64, i64)]) -> Vec<(u64, BigInt)> {
        v.iter().map(|&(q, c)| (q, BigInt::from(c))).collect()
    }

    #[test]
    fn fourth_powers() {
        let fit = interpolate_class_poly(&s(&[(2, 16), (3, 81), (5, 625), (7, 2401), (11, 14641)]), 4)
            .unwrap();
        assert_eq!(fit.class, ClassPoly::l_pow(4));
        assert!(fit.certain);
    }

    #[test]
    fn constant_fit() {
        let fit = interpolate_class_poly(&s(&[(2, 1), (3, 1)]), 0).unwrap();
        assert_eq!(fit.class, ClassPoly::one());
        assert!(fit.certain);
    }

    #[test]
    fn inconsistent_samples() {
        let err = interpolate_class_poly(&s(&[(2, 3), (3, 3), (5, 4)]), 1).unwrap_err();
        assert_eq!(err, Error::NotPolynomialCount { bound: 1 });
    }

    #[test]
    fn uncertain_when_undersampled() {
        let fit = interpolate_class_poly(&s(&[(2, 4), (3, 9), (5, 25)]), 5).unwrap();
        assert_eq!(fit.class, ClassPoly::l_pow(2));
        assert!(!fit.certain);
    }
}
