//! Truncations of the auto Igusa-zeta function and of the generalized zeta
//! functions `Θ`, assembled from point counts.
//!
//! The coefficient of `t^(n-1)` is `[A_n] * L^(-ℓ(n))`, where `A_n` is the
//! level-`n` space and `ℓ(n)` the length of its source fat point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::counter::{count_points, jet_algebra_at, CountOptions};
use crate::error::{Error, Result};
use crate::homsys::{auto_arc_system_for, build_nabla_system, EquationSystem, SystemMeta};
use crate::jetalg::{build_jet_algebra, classical_jet_algebra, BaseField};
use crate::symbolics::{
    interpolate_class_poly, pade_reconstruct, ClassPoly, MPoly, RationalFn, TPoly, ZetaTruncation,
};

pub const NORMALIZATION: &str = "L^{-d*l(n)} t^{n-1}";

/// Which space is counted at level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// Endomorphisms of the jet algebra.
    Auto,
    /// Morphisms from the jet algebra into the curve.
    CurveJets,
    /// Morphisms from `k[t]/t^n` into the curve.
    ClassicalJets,
}

#[derive(Clone, Debug)]
pub enum Mode {
    Verify(RationalFn),
    Fit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub q: u64,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaRow {
    pub n: u32,
    pub length: usize,
    pub counts: BTreeMap<u64, BigInt>,
    /// The class `[A_n]` (verified prediction or fit).
    pub class: Option<ClassPoly>,
    /// `c_{n-1} = class * L^(-length)`.
    pub coeff: Option<ClassPoly>,
    pub verified: bool,
    pub certain: bool,
    pub degree_bound: usize,
    /// Primes dividing the multiplicity, or of bad reduction.
    pub flagged_primes: Vec<u64>,
    /// Primes left out of the fit after an inconsistency.
    pub excluded_primes: Vec<u64>,
    /// Primes whose count exceeded the node budget in fit mode.
    pub skipped_primes: Vec<u64>,
    pub mismatches: Vec<Mismatch>,
    pub finding: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleCandidates {
    /// Factors `(a, b)` standing for `1 - L^a t^b`, in order of extraction.
    pub factors: Vec<(i32, u32)>,
    pub remainder: TPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaReport {
    pub curve: String,
    pub space: Space,
    pub nmax: u32,
    pub primes: Vec<u64>,
    pub rows: Vec<ZetaRow>,
    pub closed_form: Option<RationalFn>,
    pub pade: Option<RationalFn>,
    pub poles: Option<PoleCandidates>,
    pub subseries: Option<(usize, usize, ZetaTruncation)>,
}

impl ZetaReport {
    /// `true` when every row verified (verify mode) or fit (fit mode).
    pub fn all_verified(&self) -> bool {
        self.rows.iter().all(|r| r.verified)
    }

    pub fn first_failure(&self) -> Option<&ZetaRow> {
        self.rows.iter().find(|r| !r.verified)
    }

    /// The coefficients `c_0, ..., c_{nmax-1}` when all are known.
    pub fn truncation(&self) -> Option<ZetaTruncation> {
        self.rows.iter().map(|r| r.coeff.clone()).collect::<Option<Vec<_>>>().map(ZetaTruncation::new)
    }

    /// Reconstruct a rational function from the truncation and record its
    /// pole candidates.
    pub fn reconstruct(&mut self, num_deg: usize, den_deg: usize) -> Result<&RationalFn> {
        let s = self.truncation().ok_or(Error::Inconclusive {
            index: self.rows.iter().position(|r| r.coeff.is_none()).unwrap_or(0),
        })?;
        let r = pade_reconstruct(&s, num_deg, den_deg)?;
        self.poles = Some(pole_candidates(&r, DEFAULT_POLE_A, self.nmax));
        Ok(self.pade.insert(r))
    }

    pub fn extract_subseries(&mut self, r: usize, offset: usize) -> Result<&ZetaTruncation> {
        if r == 0 || offset >= r {
            return Err(Error::InvalidArgument("subseries needs r >= 1 and 0 <= offset < r".into()));
        }
        let s = self.truncation().ok_or(Error::Inconclusive {
            index: self.rows.iter().position(|r| r.coeff.is_none()).unwrap_or(0),
        })?;
        let sub = s.subseries(r, offset);
        Ok(&self.subseries.insert((r, offset, sub)).2)
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            curve: &self.curve,
            normalization: NORMALIZATION,
            rows: self.rows.iter().map(RowDoc::from).collect(),
            closed_form: self.closed_form.as_ref().map(ToString::to_string),
            pade: self.pade.as_ref().map(ToString::to_string),
            poles: self.poles.as_ref().map(|p| p.factors.iter().map(|&(a, b)| [a as i64, b as i64]).collect()),
            space: self.space,
            nmax: self.nmax,
            primes: &self.primes,
            pole_remainder: self.poles.as_ref().map(|p| crate::symbolics::series::render_tpoly(&p.remainder)),
            subseries: self.subseries.as_ref().map(|(r, offset, s)| SubseriesDoc {
                r: *r,
                offset: *offset,
                coeffs: s.coeffs().iter().map(ToString::to_string).collect(),
            }),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    curve: &'a str,
    normalization: &'a str,
    rows: Vec<RowDoc>,
    closed_form: Option<String>,
    pade: Option<String>,
    poles: Option<Vec<[i64; 2]>>,
    space: Space,
    nmax: u32,
    primes: &'a [u64],
    pole_remainder: Option<String>,
    subseries: Option<SubseriesDoc>,
}

#[derive(Serialize)]
struct SubseriesDoc {
    r: usize,
    offset: usize,
    coeffs: Vec<String>,
}

#[derive(Serialize)]
struct RowDoc {
    n: u32,
    length: usize,
    counts: CountsDoc,
    class: Option<String>,
    coeff: Option<String>,
    verified: bool,
    certain: bool,
    degree_bound: usize,
    flagged_primes: Vec<u64>,
    excluded_primes: Vec<u64>,
    skipped_primes: Vec<u64>,
    mismatches: Vec<Mismatch>,
    finding: Option<String>,
}

/// Counts keyed by the decimal prime, in increasing numeric order.
struct CountsDoc(Vec<(u64, u128)>);

impl Serialize for CountsDoc {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.0.len()))?;
        for (q, c) in &self.0 {
            map.serialize_entry(&q.to_string(), c)?;
        }
        map.end()
    }
}

impl From<&ZetaRow> for RowDoc {
    fn from(r: &ZetaRow) -> Self {
        let counts = CountsDoc(r.counts.iter().map(|(&q, c)| (q, as_u128(c))).collect());
        RowDoc {
            n: r.n,
            length: r.length,
            counts,
            class: r.class.as_ref().map(ToString::to_string),
            coeff: r.coeff.as_ref().map(ToString::to_string),
            verified: r.verified,
            certain: r.certain,
            degree_bound: r.degree_bound,
            flagged_primes: r.flagged_primes.clone(),
            excluded_primes: r.excluded_primes.clone(),
            skipped_primes: r.skipped_primes.clone(),
            mismatches: r.mismatches.clone(),
            finding: r.finding.clone(),
        }
    }
}

pub const DEFAULT_POLE_A: i32 = 10;

fn xy() -> Vec<String> {
    vec!["x".to_string(), "y".to_string()]
}

/// Level-`n` system for `space` that is valid at `q`, with its source length.
pub fn level_system(f: &MPoly, space: Space, n: u32, q: u64) -> Result<(EquationSystem, usize)> {
    match space {
        Space::Auto => {
            let alg = jet_algebra_at(f, n, q)?;
            Ok((auto_arc_system_for(f, &alg)?, alg.length()))
        }
        Space::CurveJets => {
            let alg = jet_algebra_at(f, n, q)?;
            Ok((build_nabla_system(&alg, &xy(), std::slice::from_ref(f))?, alg.length()))
        }
        Space::ClassicalJets => {
            let alg = classical_jet_algebra(n);
            Ok((build_nabla_system(&alg, &xy(), std::slice::from_ref(f))?, alg.length()))
        }
    }
}

/// Bound on the degree in `L` of the class at level `n`: the number of
/// unknowns not forced to vanish.
pub fn degree_bound(space: Space, length: usize) -> usize {
    match space {
        Space::Auto => 2 * length - 2,
        Space::CurveJets | Space::ClassicalJets => 2 * length,
    }
}

fn check_inputs(f: &MPoly, nmax: u32, primes: &[u64]) -> Result<u32> {
    if nmax < 2 {
        return Err(Error::InvalidArgument("nmax must be at least 2".into()));
    }
    if primes.is_empty() {
        return Err(Error::InvalidArgument("at least one prime is required".into()));
    }
    for (i, p) in primes.iter().enumerate() {
        if primes[..i].contains(p) {
            return Err(Error::InvalidArgument(format!("prime {p} repeated")));
        }
    }
    // Validates f through the jet algebra constructor.
    build_jet_algebra(f, 1, BaseField::Rational)?;
    Ok(f.order().unwrap())
}

/// Truncation of the auto Igusa-zeta function up to `t^(nmax-1)`.
pub fn zeta_truncation(
    f: &MPoly,
    nmax: u32,
    primes: &[u64],
    mode: &Mode,
    opts: &CountOptions,
) -> Result<ZetaReport> {
    assemble(f, Space::Auto, nmax, primes, mode, opts)
}

/// Truncation of `Θ` for curve jets or classical jets as the source.
pub fn theta_truncation(
    f: &MPoly,
    source: Space,
    nmax: u32,
    primes: &[u64],
    mode: &Mode,
    opts: &CountOptions,
) -> Result<ZetaReport> {
    if source == Space::Auto {
        return Err(Error::InvalidArgument("theta needs curve or classical jets as source".into()));
    }
    assemble(f, source, nmax, primes, mode, opts)
}

fn assemble(
    f: &MPoly,
    space: Space,
    nmax: u32,
    primes: &[u64],
    mode: &Mode,
    opts: &CountOptions,
) -> Result<ZetaReport> {
    let mult = check_inputs(f, nmax, primes)?;
    let expected = match mode {
        Mode::Verify(r) => Some(r.series(nmax as usize)?),
        Mode::Fit => None,
    };
    let mut rows = Vec::new();
    for n in 1..=nmax {
        let length = match space {
            Space::ClassicalJets => n as usize,
            _ => build_jet_algebra(f, n, BaseField::Rational)?.length(),
        };
        let bad = build_jet_algebra(f, n, BaseField::Rational)?.bad_primes().to_vec();
        let flagged: Vec<u64> =
            primes.iter().copied().filter(|&q| (mult as u64).is_multiple_of(q) || bad.contains(&q)).collect();
        let mut row = ZetaRow {
            n,
            length,
            counts: BTreeMap::new(),
            class: None,
            coeff: None,
            verified: false,
            certain: false,
            degree_bound: degree_bound(space, length),
            flagged_primes: flagged,
            excluded_primes: Vec::new(),
            skipped_primes: Vec::new(),
            mismatches: Vec::new(),
            finding: None,
        };
        for &q in primes {
            let (sys, _) = level_system(f, space, n, q)?;
            match count_points(&sys, q, opts) {
                Ok(c) => {
                    row.counts.insert(q, c.count);
                }
                Err(Error::BudgetExceeded(_)) if expected.is_none() => row.skipped_primes.push(q),
                Err(e) => return Err(e),
            }
        }
        match &expected {
            Some(s) => verify_row(&mut row, s.coeff(n as usize - 1)),
            None => fit_row(&mut row),
        }
        rows.push(row);
    }
    let closed_form = match mode {
        Mode::Verify(r) => Some(r.clone()),
        Mode::Fit => None,
    };
    let poles = closed_form.as_ref().map(|r| pole_candidates(r, DEFAULT_POLE_A, nmax));
    Ok(ZetaReport {
        curve: f.to_string(),
        space,
        nmax,
        primes: primes.to_vec(),
        rows,
        closed_form,
        pade: None,
        poles,
        subseries: None,
    })
}

fn class_value(c: &ClassPoly, q: u64) -> BigRational {
    c.eval_int(q).expect("q is nonzero")
}

fn verify_row(row: &mut ZetaRow, coeff: &ClassPoly) {
    let class = coeff.shift(row.length as i32);
    for (&q, count) in &row.counts {
        let want = class_value(&class, q);
        if want != BigRational::from_integer(count.clone()) {
            row.mismatches.push(Mismatch { q, expected: want.to_string(), actual: count.to_string() });
        }
    }
    row.verified = row.mismatches.is_empty();
    row.certain = row.verified && row.counts.len() > row.degree_bound;
    row.class = Some(class);
    row.coeff = Some(coeff.clone());
}

fn fit_row(row: &mut ZetaRow) {
    let samples: Vec<(u64, BigInt)> = row.counts.iter().map(|(&q, c)| (q, c.clone())).collect();
    let attempt = |s: &[(u64, BigInt)]| {
        if s.len() < 2 {
            Err(Error::InvalidArgument("at least two primes are needed to fit".into()))
        } else {
            interpolate_class_poly(s, row.degree_bound)
        }
    };
    let mut fit = attempt(&samples);
    let kept: Vec<(u64, BigInt)> =
        samples.iter().filter(|(q, _)| !row.flagged_primes.contains(q)).cloned().collect();
    if matches!(fit, Err(Error::NotPolynomialCount { .. })) && kept.len() < samples.len() {
        row.excluded_primes =
            samples.iter().map(|s| s.0).filter(|q| row.flagged_primes.contains(q)).collect();
        fit = attempt(&kept);
    }
    match fit {
        Ok(fit) => {
            row.coeff = Some(fit.class.shift(-(row.length as i32)));
            row.class = Some(fit.class);
            row.certain = fit.certain;
            row.verified = true;
        }
        Err(Error::NotPolynomialCount { bound }) => {
            row.finding = Some(format!(
                "non-polynomial or bad reduction: no polynomial of degree <= {bound} fits all primes"
            ));
        }
        Err(e) => row.finding = Some(e.to_string()),
    }
}

/// One cell of the count-level decomposition check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionCell {
    pub n: u32,
    pub q: u64,
    pub length: usize,
    /// Points of the space of morphisms from the jet algebra into the curve.
    pub nabla: u128,
    /// Affine points of the curve over `F_q`.
    pub curve_points: u128,
    pub auto: u128,
    /// Singular `F_q`-points of the affine curve other than the origin.
    pub other_singular: u128,
    pub holds: bool,
}

fn plane_system(eqs: Vec<MPoly>) -> Result<EquationSystem> {
    let meta = SystemMeta {
        source: "point".into(),
        target: "affine plane curve".into(),
        n: 0,
        length: 1,
        bad_primes: Vec::new(),
    };
    let eqs = eqs.into_iter().filter(|e| !e.is_zero()).collect();
    EquationSystem::new(xy(), eqs, meta)
}

fn as_u128(c: &BigInt) -> u128 {
    u128::try_from(c).expect("counts fit in 128 bits")
}

/// Check `#∇ = (#C - 1) q^(ℓ-1) + #A_n` for every level and prime.
pub fn verify_decomposition(
    f: &MPoly,
    nmax: u32,
    primes: &[u64],
    opts: &CountOptions,
) -> Result<Vec<DecompositionCell>> {
    let mult = check_inputs(f, nmax.max(2), primes)?;
    let curve = plane_system(vec![f.clone()])?;
    let singular = plane_system(vec![f.clone(), f.derivative(0), f.derivative(1)])?;
    let mut cells = Vec::new();
    for &q in primes {
        let curve_points = as_u128(&count_points(&curve, q, opts)?.count);
        let sing = as_u128(&count_points(&singular, q, opts)?.count);
        let origin_singular = mult >= 2 || {
            let (fx, fy) = (f.derivative(0), f.derivative(1));
            let p = BigInt::from(q);
            (fx.constant_term() % &p).is_zero() && (fy.constant_term() % &p).is_zero()
        };
        let other_singular = sing - u128::from(origin_singular);
        for n in 1..=nmax {
            let (nsys, length) = level_system(f, Space::CurveJets, n, q)?;
            let (asys, _) = level_system(f, Space::Auto, n, q)?;
            let nabla = as_u128(&count_points(&nsys, q, opts)?.count);
            let auto = as_u128(&count_points(&asys, q, opts)?.count);
            let fibre = (q as u128).pow(length as u32 - 1);
            let holds = Some(nabla) == (curve_points - 1).checked_mul(fibre).and_then(|x| x.checked_add(auto));
            cells.push(DecompositionCell { n, q, length, nabla, curve_points, auto, other_singular, holds });
        }
    }
    cells.sort_by_key(|c| (c.n, c.q));
    Ok(cells)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothnessVerdict {
    pub smooth: bool,
    /// First coefficient index `i` with `c_i != L^-1`, and that coefficient.
    pub witness: Option<(usize, ClassPoly)>,
}

/// Decide smoothness from a report: smooth iff every coefficient is `L^-1`.
/// An uncertain coefficient met before any witness makes the test
/// inconclusive.
pub fn smoothness_test(report: &ZetaReport) -> Result<SmoothnessVerdict> {
    let smooth_coeff = ClassPoly::l_pow(-1);
    for (index, row) in report.rows.iter().enumerate() {
        let Some(c) = row.coeff.as_ref().filter(|_| row.certain) else {
            return Err(Error::Inconclusive { index });
        };
        if c != &smooth_coeff {
            return Ok(SmoothnessVerdict { smooth: false, witness: Some((index, c.clone())) });
        }
    }
    Ok(SmoothnessVerdict { smooth: true, witness: None })
}

/// `p / (1 - L^a t^b)` when the division is exact.
fn div_binomial(p: &TPoly, a: i32, b: usize) -> Option<TPoly> {
    let deg = p.degree()?;
    if deg < b {
        return None;
    }
    let la = ClassPoly::l_pow(a);
    let mut q: Vec<ClassPoly> = Vec::with_capacity(deg - b + 1);
    for k in 0..=deg - b {
        let prev = if k >= b { &la * &q[k - b] } else { ClassPoly::zero() };
        q.push(&p.coeff(k) + &prev);
    }
    for k in deg - b + 1..=deg {
        let prev = if k >= b && k - b < q.len() { &la * &q[k - b] } else { ClassPoly::zero() };
        let tail = if k < q.len() { q[k].clone() } else { ClassPoly::zero() };
        if p.coeff(k) != &tail - &prev {
            return None;
        }
    }
    Some(TPoly::new(q))
}

/// Greedy extraction of factors `1 - L^a t^b` from the denominator, trying
/// `b` from `b_max` down and `a` from `a_max` down.
pub fn pole_candidates(r: &RationalFn, a_max: i32, b_max: u32) -> PoleCandidates {
    let mut den = r.den().clone();
    let mut factors = Vec::new();
    'outer: loop {
        for b in (1..=b_max).rev() {
            for a in (0..=a_max).rev() {
                if let Some(q) = div_binomial(&den, a, b as usize) {
                    factors.push((a, b));
                    den = q;
                    continue 'outer;
                }
            }
        }
        break;
    }
    PoleCandidates { factors, remainder: den }
}
