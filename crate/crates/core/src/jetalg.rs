//! Jet algebras `k[x,y]/((f) + (x,y)^n)` with an explicit monomial basis and
//! multiplication table, and the Hilbert–Samuel function built from them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::symbolics::fp::{int_mod, inv_mod, is_prime, rational_mod};
use crate::symbolics::ring::Ring;
use crate::symbolics::MPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseField {
    Rational,
    Prime(u64),
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rational => write!(f, "QQ"),
            BaseField::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// Number of monomials in two variables of degree `< n`.
pub fn monomial_count(n: u32) -> usize {
    (n as usize) * (n as usize + 1) / 2
}

/// Position of `x^i y^j` among the monomials of degree `< n`, which are
/// ordered `1, x, y, x^2, x*y, y^2, ...`.
pub fn monomial_index(i: u32, j: u32) -> usize {
    let k = (i + j) as usize;
    k * (k + 1) / 2 + j as usize
}

fn monomial_at(idx: usize) -> (u32, u32) {
    let mut k = 0usize;
    while (k + 1) * (k + 2) / 2 <= idx {
        k += 1;
    }
    let j = idx - k * (k + 1) / 2;
    ((k - j) as u32, j as u32)
}

/// A finite local algebra given by a monomial basis. Coefficients are
/// rationals; over `F_p` they are integers in `[0, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetAlgebra {
    n: u32,
    field: BaseField,
    label: String,
    basis: Vec<(u32, u32)>,
    /// Basis expansion of every monomial of degree `< n`, by monomial index.
    reduction: Vec<Vec<BigRational>>,
    /// `table[a][b]` is the expansion of `e_a * e_b`.
    table: Vec<Vec<Vec<BigRational>>>,
    bad_primes: Vec<u64>,
}

impl JetAlgebra {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    /// Short description of the source fat point, e.g. `J^3(y^2 - x^3)`.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn basis(&self) -> &[(u32, u32)] {
        &self.basis
    }

    /// The length `d`, the dimension over the base field.
    pub fn length(&self) -> usize {
        self.basis.len()
    }

    /// Primes dividing a pivot or a denominator met during row reduction
    /// over `ℚ`; empty over `F_p`.
    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    /// Basis expansion of `x^i y^j`; zero when `i + j >= n`.
    pub fn reduce_monomial(&self, i: u32, j: u32) -> Vec<BigRational> {
        if i + j >= self.n {
            return vec![BigRational::zero(); self.length()];
        }
        self.reduction[monomial_index(i, j)].clone()
    }

    pub fn structure(&self, a: usize, b: usize) -> &[BigRational] {
        &self.table[a][b]
    }

    /// Product of two elements in any coefficient ring, with structure
    /// constants brought in through `lift`.
    pub fn mul_with<R: Ring>(&self, u: &[R], v: &[R], lift: impl Fn(&BigRational) -> R) -> Vec<R> {
        let d = self.length();
        let mut out = vec![R::zero(); d];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let prod = ua.clone() * vb.clone();
                for (c, s) in self.table[a][b].iter().enumerate() {
                    if !s.is_zero() {
                        out[c] = out[c].clone() + prod.clone() * lift(s);
                    }
                }
            }
        }
        out
    }

    /// Product of two elements given by basis coordinates.
    pub fn mul(&self, u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
        let out = self.mul_with(u, v, |s| s.clone());
        match self.field {
            BaseField::Rational => out,
            BaseField::Prime(p) => out.iter().map(|c| reduce_rational(c, p)).collect(),
        }
    }

    /// Basis element `e_a` as a coordinate vector.
    pub fn unit_vector(&self, a: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.length()];
        v[a] = BigRational::one();
        v
    }

    /// Names of the basis monomials, e.g. `1`, `x`, `x*y`, `y^2`.
    pub fn basis_names(&self) -> Vec<String> {
        self.basis.iter().map(|&(i, j)| monomial_name(i, j)).collect()
    }

    /// The algebra over `F_p` obtained by reducing this one, when `p` is a
    /// good prime for it.
    pub fn reduce_mod(&self, p: u64) -> Option<JetAlgebra> {
        if self.field != BaseField::Rational || self.bad_primes.contains(&p) {
            return None;
        }
        let red = |v: &Vec<BigRational>| -> Vec<BigRational> {
            v.iter().map(|c| reduce_rational(c, p)).collect()
        };
        Some(JetAlgebra {
            n: self.n,
            field: BaseField::Prime(p),
            label: self.label.clone(),
            basis: self.basis.clone(),
            reduction: self.reduction.iter().map(red).collect(),
            table: self.table.iter().map(|row| row.iter().map(red).collect()).collect(),
            bad_primes: Vec::new(),
        })
    }
}

fn reduce_rational(c: &BigRational, p: u64) -> BigRational {
    let v = rational_mod(c, p).expect("denominator invertible modulo p");
    BigRational::from_integer(BigInt::from(v))
}

fn monomial_name(i: u32, j: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => None,
        1 => Some(v.to_string()),
        e => Some(format!("{v}^{e}")),
    };
    let parts: Vec<String> = [part("x", i), part("y", j)].into_iter().flatten().collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn check_plane_curve(f: &MPoly) -> Result<()> {
    if f.nvars() != 2 {
        return Err(Error::Arity { expected: 2, got: f.nvars() });
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.constant_term().is_zero() {
        return Err(Error::NotOnCurve { value: f.constant_term().to_string() });
    }
    Ok(())
}

/// Build the jet algebra of the plane curve `f = 0` at the origin, level `n`.
pub fn build_jet_algebra(f: &MPoly, n: u32, field: BaseField) -> Result<JetAlgebra> {
    check_plane_curve(f)?;
    if n == 0 {
        return Err(Error::InvalidArgument("jet level must be at least 1".into()));
    }
    if let BaseField::Prime(p) = field {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
    }
    let cols = monomial_count(n);
    let ord = f.order().unwrap();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for m in 0..cols {
        let (a, b) = monomial_at(m);
        if a + b + ord >= n {
            break;
        }
        let mut row = vec![BigRational::zero(); cols];
        for (mono, c) in f.terms() {
            let (i, j) = (mono.exps()[0] + a, mono.exps()[1] + b);
            if i + j < n {
                row[monomial_index(i, j)] = match field {
                    BaseField::Rational => BigRational::from_integer(c.clone()),
                    BaseField::Prime(p) => BigRational::from_integer(int_mod(c, p).into()),
                };
            }
        }
        rows.push(row);
    }
    let (pivots, bad) = match field {
        BaseField::Rational => rref_rational(&mut rows),
        BaseField::Prime(p) => (rref_mod(&mut rows, p), Vec::new()),
    };
    // Each reduced row reads `pivot = -sum(row[c] * m_c)` over free columns.
    let mut reduction: Vec<Option<Vec<BigRational>>> = vec![None; cols];
    let is_pivot: Vec<bool> = (0..cols).map(|c| pivots.iter().any(|p| p.1 == c)).collect();
    let basis_cols: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let d = basis_cols.len();
    for (k, &c) in basis_cols.iter().enumerate() {
        let mut v = vec![BigRational::zero(); d];
        v[k] = BigRational::one();
        reduction[c] = Some(v);
    }
    for &(r, c) in &pivots {
        let v = basis_cols
            .iter()
            .map(|&b| {
                let x = -rows[r][b].clone();
                match field {
                    BaseField::Rational => x,
                    BaseField::Prime(p) => reduce_rational(&x, p),
                }
            })
            .collect();
        reduction[c] = Some(v);
    }
    let reduction: Vec<Vec<BigRational>> = reduction.into_iter().map(Option::unwrap).collect();
    let basis: Vec<(u32, u32)> = basis_cols.iter().map(|&c| monomial_at(c)).collect();
    let table = basis
        .iter()
        .map(|&(i, j)| {
            basis
                .iter()
                .map(|&(k, l)| {
                    if i + j + k + l >= n {
                        vec![BigRational::zero(); d]
                    } else {
                        reduction[monomial_index(i + k, j + l)].clone()
                    }
                })
                .collect()
        })
        .collect();
    let label = format!("J^{n}({f})");
    Ok(JetAlgebra { n, field, label, basis, reduction, table, bad_primes: bad })
}

/// The classical jet algebra `k[t]/t^n`, written in the variable `x`.
pub fn classical_jet_algebra(n: u32) -> JetAlgebra {
    let smooth = MPoly::from_terms(vec!["x".into(), "y".into()], [(vec![0, 1], BigInt::one())]);
    let mut a = build_jet_algebra(&smooth, n, BaseField::Rational).expect("a smooth curve through the origin");
    a.label = format!("k[t]/t^{n}");
    a
}

/// Reduced row echelon form with the leftmost nonzero entry as pivot.
/// Returns `(row, column)` pivots and the primes met in pivots or
/// denominators.
fn rref_rational(rows: &mut [Vec<BigRational>]) -> (Vec<(usize, usize)>, Vec<u64>) {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut witness = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let pv = rows[r][c].clone();
        witness = witness.lcm(pv.numer()).lcm(pv.denom());
        let inv = pv.recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let factor = rows[k][c].clone();
                for j in c..cols {
                    let delta = &factor * &rows[r][j];
                    rows[k][j] -= delta;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    for row in rows.iter() {
        for x in row {
            witness = witness.lcm(x.denom());
        }
    }
    (pivots, prime_factors(&witness))
}

fn rref_mod(rows: &mut [Vec<BigRational>], p: u64) -> Vec<(usize, usize)> {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| row.iter().map(|x| rational_mod(x, p).unwrap()).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else {
            continue;
        };
        m.swap(r, k);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for k in 0..m.len() {
            if k != r && m[k][c] != 0 {
                let factor = m[k][c];
                for j in c..cols {
                    m[k][j] = (m[k][j] + p - factor * m[r][j] % p) % p;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    for (dst, src) in rows.iter_mut().zip(&m) {
        *dst = src.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    }
    pivots
}

/// Prime divisors by trial division; a cofactor left above the trial bound
/// is reported as is.
fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while d < 1_000_000 && n > BigInt::one() {
        let bd = BigInt::from(d);
        if (&n % &bd).is_zero() {
            out.push(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().unwrap_or(u64::MAX));
    }
    out
}

/// `g(x, y) = f(x + a, y + b)`, scaled to a primitive integer polynomial with
/// positive leading coefficient when the shift is not integral.
pub fn shift_to_origin(f: &MPoly, a: &BigRational, b: &BigRational) -> Result<MPoly> {
    if f.nvars() != 2 {
        return Err(Error::Arity { expected: 2, got: f.nvars() });
    }
    let fq = f.map_coeffs(|c| BigRational::from_integer(c.clone()));
    let vars = f.vars().to_vec();
    let x = &MPoly::var_in(vars.clone(), 0) + &MPoly::constant_in(vars.clone(), a.clone());
    let y = &MPoly::var_in(vars.clone(), 1) + &MPoly::constant_in(vars.clone(), b.clone());
    let g = fq.compose(&[x, y]);
    let value = g.constant_term();
    if !value.is_zero() {
        return Err(Error::NotOnCurve { value: value.to_string() });
    }
    let den = g.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    if den.is_one() {
        return Ok(g.map_coeffs(|c| c.to_integer()));
    }
    let scaled = g.map_coeffs(|c| (c * BigRational::from_integer(den.clone())).to_integer());
    let content = scaled.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    Ok(scaled.map_coeffs(|c| c / &content))
}

/// Eventual linear behaviour `ℓ(n) = e0 * n + e1` of the length function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSamuelFit {
    /// `ℓ(1), ..., ℓ(nmax)`.
    pub lengths: Vec<usize>,
    pub e0: i64,
    pub e1: i64,
    /// Least `n` from which the linear formula holds up to `nmax`.
    pub n0: u32,
}

pub fn hilbert_samuel(f: &MPoly, nmax: u32) -> Result<HilbertSamuelFit> {
    if nmax < 3 {
        return Err(Error::InvalidArgument("nmax must be at least 3".into()));
    }
    let lengths = (1..=nmax)
        .map(|n| build_jet_algebra(f, n, BaseField::Rational).map(|a| a.length()))
        .collect::<Result<Vec<_>>>()?;
    let last = lengths[nmax as usize - 1] as i64;
    let e0 = last - lengths[nmax as usize - 2] as i64;
    let e1 = last - e0 * nmax as i64;
    let mut n0 = nmax;
    while n0 > 1 && lengths[n0 as usize - 2] as i64 == e0 * (n0 as i64 - 1) + e1 {
        n0 -= 1;
    }
    if n0 + 2 > nmax {
        return Err(Error::NoLinearTail { nmax });
    }
    Ok(HilbertSamuelFit { lengths, e0, e1, n0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolics::parse_curve;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn monomial_indexing_round_trips() {
        for idx in 0..monomial_count(9) {
            let (i, j) = monomial_at(idx);
            assert_eq!(monomial_index(i, j), idx);
        }
        assert_eq!(monomial_at(4), (1, 1));
    }

    #[test]
    fn cusp_level_two_and_four() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let a2 = build_jet_algebra(&f, 2, BaseField::Rational).unwrap();
        assert_eq!(a2.basis(), &[(0, 0), (1, 0), (0, 1)]);
        let a4 = build_jet_algebra(&f, 4, BaseField::Rational).unwrap();
        assert_eq!(a4.length(), 7);
        assert_eq!(a4.basis_names(), ["1", "x", "y", "x^2", "x*y", "x^3", "x^2*y"]);
        let x3 = a4.reduce_monomial(3, 0);
        assert_eq!(a4.reduce_monomial(0, 2), x3);
        assert!(a4.reduce_monomial(1, 2).iter().all(Zero::is_zero));
        assert!(a4.reduce_monomial(0, 3).iter().all(Zero::is_zero));
        assert!(a4.bad_primes().is_empty());
    }

    #[test]
    fn node_basis_is_the_two_axes() {
        let f = parse_curve("x*y").unwrap();
        let a = build_jet_algebra(&f, 5, BaseField::Rational).unwrap();
        assert_eq!(
            a.basis(),
            &[(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (3, 0), (0, 3), (4, 0), (0, 4)]
        );
    }

    #[test]
    fn rejects_points_off_the_curve() {
        let f = parse_curve("y^2 - x^3 + 1").unwrap();
        assert!(matches!(
            build_jet_algebra(&f, 3, BaseField::Rational),
            Err(Error::NotOnCurve { .. })
        ));
    }

    #[test]
    fn denominators_mark_bad_primes() {
        let f = parse_curve("3*y - x^2").unwrap();
        let a = build_jet_algebra(&f, 3, BaseField::Rational).unwrap();
        assert_eq!(a.bad_primes(), &[3]);
        assert!(a.reduce_mod(3).is_none());
        let b = build_jet_algebra(&f, 3, BaseField::Prime(5)).unwrap();
        assert_eq!(a.reduce_mod(5).unwrap(), b);
    }

    #[test]
    fn shifts() {
        let f = parse_curve("y^2 - x^3 + x^2").unwrap();
        let g = shift_to_origin(&f, &q(1), &q(0)).unwrap();
        assert_eq!(g, parse_curve("y^2 - x^3 - 2*x^2 - x").unwrap());
        let h = parse_curve("y - x").unwrap();
        assert_eq!(shift_to_origin(&h, &q(2), &q(2)).unwrap(), h);
        let half = BigRational::new(1.into(), 2.into());
        let line = parse_curve("2*y - x").unwrap();
        assert_eq!(shift_to_origin(&line, &q(1), &half).unwrap(), line);
        assert!(matches!(shift_to_origin(&h, &q(1), &q(0)), Err(Error::NotOnCurve { .. })));
    }

    #[test]
    fn hilbert_samuel_examples() {
        let cusp = hilbert_samuel(&parse_curve("y^2 - x^3").unwrap(), 6).unwrap();
        assert_eq!(cusp.lengths, [1, 3, 5, 7, 9, 11]);
        assert_eq!((cusp.e0, cusp.e1, cusp.n0), (2, -1, 1));
        let node = hilbert_samuel(&parse_curve("x*y").unwrap(), 5).unwrap();
        assert_eq!(node.lengths, [1, 3, 5, 7, 9]);
        assert_eq!((node.e0, node.e1), (2, -1));
        let smooth = hilbert_samuel(&parse_curve("y - x^2").unwrap(), 4).unwrap();
        assert_eq!(smooth.lengths, [1, 2, 3, 4]);
        assert_eq!((smooth.e0, smooth.e1), (1, 0));
        let e6 = hilbert_samuel(&parse_curve("y^3 - x^4").unwrap(), 6).unwrap();
        assert_eq!((e6.e0, e6.e1, e6.n0), (3, -3, 2));
    }

    #[test]
    fn short_range_has_no_certified_tail() {
        let f = parse_curve("y^4 - x^5").unwrap();
        assert_eq!(hilbert_samuel(&f, 4), Err(Error::NoLinearTail { nmax: 4 }));
    }
}
