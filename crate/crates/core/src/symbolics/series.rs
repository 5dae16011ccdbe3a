//! Truncated series and rational functions in `t` over `ℤ[L, L^-1]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::classpoly::{l_factor, ClassPoly};
use super::lfrac::LFrac;
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// Polynomial in `t` with class coefficients.
pub type TPoly = UPoly<ClassPoly>;

/// First `T` coefficients of a power series in `t`; index `i` is the `t^i` term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaTruncation {
    coeffs: Vec<ClassPoly>,
}

impl ZetaTruncation {
    pub fn new(coeffs: Vec<ClassPoly>) -> Self {
        ZetaTruncation { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ClassPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &ClassPoly {
        &self.coeffs[i]
    }

    /// The series `Σ c_{i r + offset} t^i`, keeping only indices below the order.
    pub fn subseries(&self, r: usize, offset: usize) -> ZetaTruncation {
        assert!(r >= 1, "stride must be positive");
        ZetaTruncation {
            coeffs: self.coeffs.iter().skip(offset).step_by(r).cloned().collect(),
        }
    }
}

/// `num / den` in `ℤ[L, L^-1][t]`, with `den(0) != 0`.
///
/// Normal form: the common content of all coefficients is divided out, and
/// the unit `±L^k` is fixed so that the lowest `L`-term of `den(0)` is a
/// positive constant. The fraction is not reduced in `t`; compare functions
/// with [`RationalFn::same_function`].
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: TPoly,
    den: TPoly,
}

impl RationalFn {
    pub fn new(num: TPoly, den: TPoly) -> Result<Self> {
        if den.coeff(0).is_zero() {
            return Err(Error::NotExpandable);
        }
        if num.is_zero() {
            return Ok(RationalFn { num, den: TPoly::one() });
        }
        let g = num
            .coeffs()
            .iter()
            .chain(den.coeffs())
            .fold(ClassPoly::zero(), |acc, c| acc.gcd(c));
        let divide = |p: &TPoly| p.map(|c| c.div_exact(&g).expect("content divides"));
        let (num, den) = (divide(&num), divide(&den));
        let (_, unit) = den.coeff(0).unit_normal();
        let inv = unit_inverse(&unit);
        Ok(RationalFn { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn polynomial(num: TPoly) -> Self {
        Self::new(num, TPoly::one()).expect("constant denominator")
    }

    pub fn num(&self) -> &TPoly {
        &self.num
    }

    pub fn den(&self) -> &TPoly {
        &self.den
    }

    /// Equality as elements of `ℚ(L)(t)`.
    pub fn same_function(&self, o: &RationalFn) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        Self::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    /// `None` when the numerator has zero constant term.
    pub fn inverse(&self) -> Option<RationalFn> {
        Self::new(self.den.clone(), self.num.clone()).ok()
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn> {
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn pow(&self, e: i64) -> Option<RationalFn> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = RationalFn::polynomial(TPoly::one());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// Power series expansion to order `order`.
    pub fn series(&self, order: usize) -> Result<ZetaTruncation> {
        let den: Vec<LFrac> = self.den.coeffs().iter().map(LFrac::from_class).collect();
        let lead = den[0].clone();
        let mut out: Vec<LFrac> = Vec::with_capacity(order);
        for k in 0..order {
            let mut acc = LFrac::from_class(&self.num.coeff(k));
            for (j, dj) in den.iter().enumerate().skip(1).take(k) {
                acc = acc - dj.clone() * out[k - j].clone();
            }
            out.push(acc / lead.clone());
        }
        out.iter()
            .enumerate()
            .map(|(index, c)| c.to_class().ok_or(Error::NotLaurent { index }))
            .collect::<Result<Vec<_>>>()
            .map(ZetaTruncation::new)
    }
}

fn unit_inverse(u: &ClassPoly) -> ClassPoly {
    let (k, c) = u.terms().next().expect("unit is nonzero");
    ClassPoly::monomial(c.clone(), -k)
}

/// `Σ_k c_k t^k` over class coefficients, rendered as a flat sum of
/// `c*L^a*t^b` terms ordered by `t`-degree, then `L`-degree.
pub fn render_tpoly(p: &TPoly) -> String {
    let mut out = String::new();
    let mut first = true;
    for (b, c) in p.coeffs().iter().enumerate() {
        for (a, coef) in c.terms() {
            let neg = coef.is_negative();
            out.push_str(match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            });
            first = false;
            let abs = coef.abs();
            let mut factors = Vec::new();
            if let Some(l) = l_factor(a) {
                factors.push(l);
            }
            match b {
                0 => {}
                1 => factors.push("t".into()),
                b => factors.push(format!("t^{b}")),
            }
            if factors.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format!("{abs}*{}", factors.join("*")));
            }
        }
    }
    if first {
        out.push('0');
    }
    out
}

fn term_count(p: &TPoly) -> usize {
    p.coeffs().iter().map(|c| c.terms().count()).sum()
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = render_tpoly(&self.num);
        if self.den == TPoly::one() {
            return write!(f, "{num}");
        }
        let den = render_tpoly(&self.den);
        let wrap = |s: String, p: &TPoly| if term_count(p) > 1 { format!("({s})") } else { s };
        write!(f, "{}/{}", wrap(num, &self.num), wrap(den, &self.den))
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

/// Solve `A x = b` over `ℚ(L)`; free unknowns are set to zero.
///
/// Pivots are chosen column by column as the entry of lowest degree weight.
fn solve(mut a: Vec<Vec<LFrac>>, mut b: Vec<LFrac>, ncols: usize) -> Option<Vec<LFrac>> {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let best = (row..nrows)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].weight());
        let Some(p) = best else { continue };
        a.swap(row, p);
        b.swap(row, p);
        let inv = LFrac::one() / a[row][col].clone();
        for c in col..ncols {
            a[row][c] = a[row][c].clone() * inv.clone();
        }
        b[row] = b[row].clone() * inv;
        for r in 0..nrows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..ncols {
                a[r][c] = a[r][c].clone() - f.clone() * a[row][c].clone();
            }
            b[r] = b[r].clone() - f * b[row].clone();
        }
        pivots.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    if b[row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![LFrac::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = b[r].clone();
    }
    Some(x)
}

/// Scale a vector over `ℚ(L)` to one over `ℤ[L]`.
fn clear_denominators(v: &[LFrac]) -> Vec<ClassPoly> {
    let mut den = UPoly::<BigRational>::one();
    for c in v {
        let g = den.gcd(c.den());
        let (q, _) = c.den().div_rem(&g);
        den = &den * &q;
    }
    let scaled: Vec<LFrac> = v
        .iter()
        .map(|c| c.clone() * LFrac::new(den.clone(), UPoly::one()))
        .collect();
    let int_den = scaled
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(&c.integer_denominator()));
    let k = LFrac::new(UPoly::constant(BigRational::from_integer(int_den)), UPoly::one());
    scaled
        .into_iter()
        .map(|c| (c * k.clone()).to_class().expect("denominators cleared"))
        .collect()
}

/// Rational function with numerator degree `<= num_deg` and denominator
/// degree `<= den_deg` whose expansion reproduces every coefficient of `s`.
///
/// The smallest denominator degree that works is used, with the denominator
/// normalized to constant term one before clearing denominators.
pub fn pade_reconstruct(s: &ZetaTruncation, num_deg: usize, den_deg: usize) -> Result<RationalFn> {
    let needed = num_deg + den_deg + 1;
    if s.order() < needed {
        return Err(Error::TooFewCoefficients { needed, got: s.order() });
    }
    let c: Vec<LFrac> = s.coeffs().iter().map(LFrac::from_class).collect();
    let coef = |i: isize| if i < 0 { LFrac::zero() } else { c[i as usize].clone() };
    for e in 0..=den_deg {
        // q_0 = 1; unknowns q_1..q_e; equations for k in num_deg+1..T.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in (num_deg + 1)..s.order() {
            rows.push((1..=e).map(|j| coef(k as isize - j as isize)).collect::<Vec<_>>());
            rhs.push(-coef(k as isize));
        }
        let tail = if e == 0 {
            rhs.iter().all(|v| v.is_zero()).then(Vec::new)
        } else {
            solve(rows, rhs, e)
        };
        let Some(tail) = tail else { continue };
        let mut q = vec![LFrac::one()];
        q.extend(tail);
        let p: Vec<LFrac> = (0..=num_deg)
            .map(|k| {
                (0..=e.min(k)).fold(LFrac::zero(), |acc, j| acc + q[j].clone() * c[k - j].clone())
            })
            .collect();
        let mut all = p.clone();
        all.extend(q.iter().cloned());
        let ints = clear_denominators(&all);
        let (pn, qd) = ints.split_at(p.len());
        let candidate = RationalFn::new(TPoly::new(pn.to_vec()), TPoly::new(qd.to_vec()))?;
        if candidate.series(s.order()).as_ref() == Ok(s) {
            return Ok(candidate);
        }
    }
    Err(Error::NoFit { num_deg, den_deg })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(k: i32) -> ClassPoly {
        ClassPoly::l_pow(k)
    }

    fn int(c: i64) -> ClassPoly {
        ClassPoly::from_int(c)
    }

    fn geometric_smooth() -> RationalFn {
        RationalFn::new(TPoly::constant(l(-1)), TPoly::new(vec![int(1), int(-1)])).unwrap()
    }

    #[test]
    fn smooth_series() {
        let s = geometric_smooth().series(3).unwrap();
        assert_eq!(s.coeffs(), &[l(-1), l(-1), l(-1)]);
    }

    #[test]
    fn one_over_one_minus_l_t_cubed() {
        let r = RationalFn::new(TPoly::one(), TPoly::new(vec![int(1), int(0), int(0), -l(1)])).unwrap();
        assert_eq!(r.series(4).unwrap().coeffs(), &[int(1), int(0), int(0), l(1)]);
    }

    #[test]
    fn zero_constant_denominator_is_rejected() {
        let r = RationalFn::new(TPoly::one(), TPoly::new(vec![int(0), int(1)]));
        assert_eq!(r.unwrap_err(), Error::NotExpandable);
    }

    #[test]
    fn non_laurent_coefficients_are_reported() {
        let r = RationalFn::new(TPoly::one(), TPoly::constant(int(2))).unwrap();
        assert_eq!(r.series(2).unwrap_err(), Error::NotLaurent { index: 0 });
    }

    #[test]
    fn subseries() {
        let s = ZetaTruncation::new((0..6).map(int).collect());
        assert_eq!(s.subseries(3, 0).coeffs(), &[int(0), int(3)]);
        assert_eq!(s.subseries(2, 1).coeffs(), &[int(1), int(3), int(5)]);
        assert_eq!(s.subseries(1, 0), s);
    }

    #[test]
    fn pade_examples() {
        let s = ZetaTruncation::new(vec![l(-1); 4]);
        let r = pade_reconstruct(&s, 0, 1).unwrap();
        assert!(r.same_function(&geometric_smooth()));

        let s = ZetaTruncation::new((0..6).map(|k| int(1 << k)).collect());
        let r = pade_reconstruct(&s, 0, 1).unwrap();
        let expected = RationalFn::new(TPoly::one(), TPoly::new(vec![int(1), int(-2)])).unwrap();
        assert_eq!(r, expected);
        assert_eq!(r.to_string(), "1/(1 - 2*t)");
    }

    #[test]
    fn pade_needs_enough_terms() {
        let s = ZetaTruncation::new(vec![int(1); 3]);
        assert_eq!(
            pade_reconstruct(&s, 2, 2).unwrap_err(),
            Error::TooFewCoefficients { needed: 5, got: 3 }
        );
    }

    #[test]
    fn pade_reports_no_fit() {
        // 1, 1, 2, 3, 5, 8, 13 needs a quadratic denominator.
        let s = ZetaTruncation::new([1, 1, 2, 3, 5, 8, 13].into_iter().map(int).collect());
        assert_eq!(pade_reconstruct(&s, 1, 1).unwrap_err(), Error::NoFit { num_deg: 1, den_deg: 1 });
        assert!(pade_reconstruct(&s, 1, 2).is_ok());
    }

    #[test]
    fn normal_form_removes_content_and_units() {
        let num = TPoly::new(vec![ClassPoly::monomial(2, 1)]);
        let den = TPoly::new(vec![ClassPoly::monomial(-2, 2), ClassPoly::monomial(4, 3)]);
        let r = RationalFn::new(num, den).unwrap();
        assert_eq!(r.to_string(), "-L^-1/(1 - 2*L*t)");
    }
}
