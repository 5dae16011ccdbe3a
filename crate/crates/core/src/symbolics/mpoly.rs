//! Sparse multivariate polynomials with exact coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::fp::FpElem;
use super::ring::Ring;
use crate::error::{Error, Result};

/// Exponent vector. Ordered by total degree, then with larger exponents of
/// earlier variables first, so the order starts `1, x, y, x^2, x*y, y^2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| o.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Sparse polynomial over `C` in a named, ordered variable list.
///
/// Zero coefficients are never stored. Terms iterate in [`Monomial`] order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly<C = BigInt> {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Ring> MPoly<C> {
    pub fn zero(vars: &[&str]) -> Self {
        Self::zero_in(vars.iter().map(|s| s.to_string()).collect())
    }

    pub fn zero_in(vars: Vec<String>) -> Self {
        MPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant_in(vars: Vec<String>, c: C) -> Self {
        let n = vars.len();
        Self::from_terms(vars, [(vec![0; n], c)])
    }

    /// The `i`-th variable as a polynomial.
    pub fn var_in(vars: Vec<String>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::from_terms(vars, [(e, C::one())])
    }

    /// Builds a polynomial, merging repeated exponent vectors.
    pub fn from_terms(vars: Vec<String>, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let mut p = Self::zero_in(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.nvars()])
    }

    /// Highest total degree (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Lowest total degree of a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    /// Indices of variables occurring with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero_in(self.vars.clone());
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant_in(self.vars.clone(), C::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        self.filter_terms(|m| m.degree() == k)
    }

    /// Terms of total degree `< k`.
    pub fn truncate_below(&self, k: u32) -> Self {
        self.filter_terms(|m| m.degree() < k)
    }

    fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        MPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> MPoly<D> {
        let mut out = MPoly::zero_in(self.vars.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Evaluate in any ring that receives the coefficients through `lift`.
    pub fn eval_with<R: Ring>(&self, point: &[R], lift: impl Fn(&C) -> R) -> R {
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitute `subs[i]` for the `i`-th variable. All substitutes share
    /// one variable list, which becomes the result's.
    pub fn compose(&self, subs: &[MPoly<C>]) -> MPoly<C> {
        assert_eq!(subs.len(), self.nvars(), "one substitute per variable");
        let target = subs
            .first()
            .map(|s| s.vars.clone())
            .unwrap_or_default();
        let mut powers: Vec<Vec<MPoly<C>>> = subs
            .iter()
            .map(|s| vec![MPoly::constant_in(s.vars.clone(), C::one())])
            .collect();
        let mut out = MPoly::zero_in(target.clone());
        for (m, c) in &self.terms {
            let mut t = MPoly::constant_in(target.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero_in(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut k = C::zero();
            for _ in 0..e {
                k = k + c.clone();
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), k);
        }
        out
    }

    /// The same polynomial in a variable list that contains all current
    /// variables (matched by name).
    pub fn embed(&self, vars: &[String]) -> Result<Self> {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or(Error::VariableMismatch))
            .collect::<Result<_>>()?;
        let mut out = Self::zero_in(vars.to_vec());
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (k, &j) in idx.iter().enumerate() {
                e[j] = m.0[k];
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    fn same_vars(&self, o: &Self) {
        assert_eq!(self.vars, o.vars, "polynomials live in different variable lists");
    }
}

impl MPoly<BigInt> {
    /// Evaluate modulo the common modulus of `point`.
    pub fn eval_fp(&self, point: &[FpElem]) -> Result<FpElem> {
        if point.len() != self.nvars() {
            return Err(Error::Arity { expected: self.nvars(), got: point.len() });
        }
        let p = match point.first() {
            Some(x) => x.modulus(),
            None => {
                // A constant polynomial; no modulus is available to reduce into.
                return Err(Error::Arity { expected: 1, got: 0 });
            }
        };
        if let Some(bad) = point.iter().find(|x| x.modulus() != p) {
            return Err(Error::ModulusMismatch(p, bad.modulus()));
        }
        let mut acc = FpElem::new(0, p);
        for (m, c) in &self.terms {
            let c = (c % BigInt::from(p)).to_i64().unwrap();
            let mut t = FpElem::new(c, p);
            for (x, &e) in point.iter().zip(&m.0) {
                t = t.mul(x.pow(e as u64))?;
            }
            acc = acc.add(t)?;
        }
        Ok(acc)
    }
}

impl<'a, C: Ring> Add<&'a MPoly<C>> for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn add(self, o: &MPoly<C>) -> MPoly<C> {
        self.same_vars(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Ring> Sub<&'a MPoly<C>> for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn sub(self, o: &MPoly<C>) -> MPoly<C> {
        self.same_vars(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Ring> Mul<&'a MPoly<C>> for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn mul(self, o: &MPoly<C>) -> MPoly<C> {
        self.same_vars(o);
        let mut out = MPoly::zero_in(self.vars.clone());
        for (ma, a) in &self.terms {
            for (mb, b) in &o.terms {
                out.add_term(ma.mul(mb), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<C: Ring> Neg for &MPoly<C> {
    type Output = MPoly<C>;
    fn neg(self) -> MPoly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Ring + Signed + fmt::Display> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> = m
                .0
                .iter()
                .zip(&self.vars)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<C: Ring + Signed + fmt::Display> fmt::Debug for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn cusp() -> MPoly {
        MPoly::from_terms(xy(), [(vec![0, 2], BigInt::from(1)), (vec![3, 0], BigInt::from(-1))])
    }

    #[test]
    fn order_starts_with_low_degree() {
        let mut ms = [Monomial::new(vec![0, 2]),
            Monomial::new(vec![1, 0]),
            Monomial::new(vec![0, 0]),
            Monomial::new(vec![1, 1]),
            Monomial::new(vec![0, 1]),
            Monomial::new(vec![2, 0])];
        ms.sort();
        let exps: Vec<_> = ms.iter().map(|m| m.exps().to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn renders_lowest_degree_first() {
        assert_eq!(cusp().to_string(), "y^2 - x^3");
        assert_eq!((-&cusp()).to_string(), "-y^2 + x^3");
    }

    #[test]
    fn eval_mod_p() {
        let pt = [FpElem::new(2, 5), FpElem::new(3, 5)];
        assert_eq!(cusp().eval_fp(&pt).unwrap().value(), 1);
        let bad = [FpElem::new(2, 5), FpElem::new(3, 7)];
        assert_eq!(cusp().eval_fp(&bad), Err(Error::ModulusMismatch(5, 7)));
        let zero = MPoly::<BigInt>::zero(&["x", "y"]);
        assert_eq!(zero.eval_fp(&[FpElem::new(1, 3), FpElem::new(2, 3)]).unwrap().value(), 0);
        let prod = MPoly::from_terms(xy(), [(vec![1, 1], BigInt::from(1))]);
        assert_eq!(prod.eval_fp(&[FpElem::new(0, 7), FpElem::new(4, 7)]).unwrap().value(), 0);
    }

    #[test]
    fn compose_shifts() {
        let x = MPoly::<BigInt>::var_in(xy(), 0);
        let y = MPoly::<BigInt>::var_in(xy(), 1);
        let one = MPoly::constant_in(xy(), BigInt::from(1));
        let g = cusp().compose(&[&x + &one, y]);
        // y^2 - (x+1)^3
        assert_eq!(g.to_string(), "-1 - 3*x - 3*x^2 + y^2 - x^3");
    }

    #[test]
    fn derivative_and_order() {
        assert_eq!(cusp().derivative(0).to_string(), "-3*x^2");
        assert_eq!(cusp().order(), Some(2));
        assert_eq!(cusp().total_degree(), 3);
    }
}
