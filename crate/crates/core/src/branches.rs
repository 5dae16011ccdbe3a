//! Newton polygons, Newton–Puiseux branches over `ℚ`, value semigroups and
//! conductors of plane curve germs at the origin.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolics::{LFrac, MPoly, UPoly};

type Q = BigRational;

/// Bivariate polynomial as a map from `(i, j)`, the exponents of `x` and
/// `y`, to nonzero coefficients.
type Biv = BTreeMap<(u32, u32), Q>;

const MAX_STAGES: usize = 64;

/// Lowest total degree of a term of `f`.
pub fn multiplicity(f: &MPoly) -> Result<u32> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.constant_term().is_zero() {
        return Err(Error::NotOnCurve { value: f.constant_term().to_string() });
    }
    Ok(f.order().unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: (u32, u32),
    pub to: (u32, u32),
    /// `Δj / Δi`, negative.
    pub slope: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub support: Vec<(u32, u32)>,
    /// Vertices by increasing `i`.
    pub vertices: Vec<(u32, u32)>,
    pub edges: Vec<Edge>,
}

/// Vertices of the lower-left boundary, from the lowest point on the
/// leftmost column to the leftmost point on the lowest row.
fn hull(points: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let Some(&start) = points.iter().min() else {
        return Vec::new();
    };
    let mut out = vec![start];
    let mut cur = start;
    loop {
        // Among lower points, the one seen at the smallest ratio di/dj,
        // farthest along on ties.
        let next = points
            .iter()
            .filter(|p| p.1 < cur.1)
            .min_by(|a, b| {
                let ra = Q::new((a.0 as i64 - cur.0 as i64).into(), ((cur.1 - a.1) as i64).into());
                let rb = Q::new((b.0 as i64 - cur.0 as i64).into(), ((cur.1 - b.1) as i64).into());
                ra.cmp(&rb).then(a.1.cmp(&b.1))
            })
            .copied();
        match next {
            Some(p) => {
                out.push(p);
                cur = p;
            }
            None => return out,
        }
    }
}

pub fn newton_polygon(f: &MPoly) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.nvars() != 2 {
        return Err(Error::Arity { expected: 2, got: f.nvars() });
    }
    let mut support: Vec<(u32, u32)> = f.terms().map(|(m, _)| (m.exps()[0], m.exps()[1])).collect();
    support.sort();
    let vertices = hull(&support);
    let edges = vertices
        .windows(2)
        .map(|w| Edge {
            from: w[0],
            to: w[1],
            slope: Q::new(
                (w[1].1 as i64 - w[0].1 as i64).into(),
                (w[1].0 as i64 - w[0].0 as i64).into(),
            ),
        })
        .collect();
    Ok(NewtonPolygon { support, vertices, edges })
}

/// A branch `t ↦ (x(t), y(t))` with rational coefficients, truncated after
/// `t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxBranch {
    /// `x = t^ramification`; zero for the branch along `x = 0`.
    pub ramification: u32,
    pub x: Vec<Q>,
    pub y: Vec<Q>,
    pub order: u32,
    /// Leading coefficients of `x` and `y` at `t^multiplicity`.
    pub tangent: (Q, Q),
}

impl PuiseuxBranch {
    fn from_series(ramification: u32, x: Vec<Q>, y: Vec<Q>, order: u32) -> Self {
        let mut b = PuiseuxBranch { ramification, x, y, order, tangent: (Q::zero(), Q::zero()) };
        let r = b.multiplicity() as usize;
        b.tangent = (coeff(&b.x, r), coeff(&b.y, r));
        b
    }

    /// `min(ord x, ord y)`, the multiplicity of the branch.
    pub fn multiplicity(&self) -> u32 {
        match (series_order(&self.x), series_order(&self.y)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0,
        }
    }

    pub fn x_string(&self) -> String {
        render_series(&self.x)
    }

    pub fn y_string(&self) -> String {
        render_series(&self.y)
    }
}

fn coeff(s: &[Q], k: usize) -> Q {
    s.get(k).cloned().unwrap_or_else(Q::zero)
}

fn series_order(s: &[Q]) -> Option<u32> {
    s.iter().position(|c| !c.is_zero()).map(|k| k as u32)
}

/// Ascending rendering in `t`, e.g. `t - 1/2*t^2`.
pub fn render_series(s: &[Q]) -> String {
    let mut out = String::new();
    for (k, c) in s.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let var = match k {
            0 => None,
            1 => Some("t".to_string()),
            k => Some(format!("t^{k}")),
        };
        match (var, a.is_one()) {
            (None, _) => out.push_str(&a.to_string()),
            (Some(v), true) => out.push_str(&v),
            (Some(v), false) => out.push_str(&format!("{a}*{v}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn series_mul(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `Σ a_ij X^i Y^j` with `X = t^xs` shifted and `Y` a series, modulo `t^len`.
fn eval_biv(g: &Biv, x: &[Q], y: &[Q], len: usize) -> Vec<Q> {
    let max_i = g.keys().map(|k| k.0).max().unwrap_or(0);
    let max_j = g.keys().map(|k| k.1).max().unwrap_or(0);
    let mut one = vec![Q::zero(); len];
    if len > 0 {
        one[0] = Q::one();
    }
    let mut xp = vec![one.clone()];
    for _ in 0..max_i {
        xp.push(series_mul(xp.last().unwrap(), x, len));
    }
    let mut yp = vec![one];
    for _ in 0..max_j {
        yp.push(series_mul(yp.last().unwrap(), y, len));
    }
    let mut acc = vec![Q::zero(); len];
    for ((i, j), a) in g {
        let t = series_mul(&xp[*i as usize], &yp[*j as usize], len);
        for (dst, v) in acc.iter_mut().zip(t) {
            *dst += a * v;
        }
    }
    acc
}

fn to_biv(f: &MPoly) -> Biv {
    f.terms()
        .map(|(m, c)| ((m.exps()[0], m.exps()[1]), Q::from_integer(c.clone())))
        .collect()
}

/// `true` iff `f(x(t), y(t)) ≡ 0 mod t^order`.
pub fn verify_uniformization(f: &MPoly, branch: &PuiseuxBranch, order: u32) -> bool {
    let len = order as usize;
    let pad = |s: &[Q]| -> Vec<Q> {
        let mut v: Vec<Q> = s.iter().take(len).cloned().collect();
        v.resize(len, Q::zero());
        v
    };
    eval_biv(&to_biv(f), &pad(&branch.x), &pad(&branch.y), len).iter().all(Zero::is_zero)
}

/// `f` viewed in `ℚ(x)[y]`, with `x` written as the field generator.
fn as_upoly_in_y(f: &MPoly) -> UPoly<LFrac> {
    let deg_y = f.terms().map(|(m, _)| m.exps()[1]).max().unwrap_or(0) as usize;
    let max_i = f.terms().map(|(m, _)| m.exps()[0]).max().unwrap_or(0) as usize;
    let mut cols = vec![vec![Q::zero(); max_i + 1]; deg_y + 1];
    for (m, c) in f.terms() {
        cols[m.exps()[1] as usize][m.exps()[0] as usize] = Q::from_integer(c.clone());
    }
    UPoly::new(cols.into_iter().map(|c| LFrac::new(UPoly::new(c), UPoly::one())).collect())
}

/// Squarefreeness of `f` over `ℚ`: `gcd(f, ∂f/∂y)` is constant in `ℚ(x)[y]`
/// and the content in `ℚ[x]` is squarefree.
pub fn is_squarefree(f: &MPoly) -> bool {
    let p = as_upoly_in_y(f);
    if p.degree().unwrap_or(0) > 0 && p.gcd(&p.derivative()).degree().unwrap_or(0) > 0 {
        return false;
    }
    let content = f
        .terms()
        .map(|(m, _)| m.exps()[1])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|j| {
            let max_i = f.terms().map(|(m, _)| m.exps()[0]).max().unwrap_or(0) as usize;
            let mut c = vec![Q::zero(); max_i + 1];
            for (m, a) in f.terms().filter(|(m, _)| m.exps()[1] == j) {
                c[m.exps()[0] as usize] = Q::from_integer(a.clone());
            }
            UPoly::new(c)
        })
        .fold(UPoly::<Q>::zero(), |acc, c| acc.gcd(&c));
    content.degree().unwrap_or(0) == 0 || content.gcd(&content.derivative()).degree().unwrap_or(0) == 0
}

/// Rational roots of a polynomial with their multiplicities, and the
/// cofactor without rational roots.
fn rational_roots(p: &UPoly<Q>) -> (Vec<(Q, usize)>, UPoly<Q>) {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    let den = rest.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> =
        rest.coeffs().iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
    let low = ints.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(BigInt::one);
    let high = ints.last().cloned().unwrap_or_else(BigInt::one);
    let mut cands = Vec::new();
    if ints.first().is_some_and(Zero::is_zero) {
        cands.push(Q::zero());
    }
    for a in divisors(&low) {
        for b in divisors(&high) {
            let c = Q::new(a.clone(), b);
            cands.push(c.clone());
            cands.push(-c);
        }
    }
    cands.sort();
    cands.dedup();
    for c in cands {
        let lin = UPoly::new(vec![-c.clone(), Q::one()]);
        let mut mult = 0;
        while rest.degree().unwrap_or(0) > 0 {
            match rest.div_exact(&lin) {
                Some(q) => {
                    rest = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            roots.push((c, mult));
        }
    }
    (roots, rest)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out
}

fn render_z(p: &UPoly<Q>) -> String {
    let den = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let terms = p.coeffs().iter().enumerate().map(|(k, c)| {
        (vec![k as u32], (c * Q::from_integer(den.clone())).to_integer())
    });
    MPoly::from_terms(vec!["z".into()], terms).to_string()
}

/// Rational `q`-th root of `w`, if one exists.
fn rational_root(w: &Q, q: u32) -> Option<Q> {
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(q);
        (num_traits::pow(r.clone(), q as usize) == n.abs()).then_some(r)
    };
    if w.is_negative() && q.is_multiple_of(2) {
        return None;
    }
    let (a, b) = (root(w.numer())?, root(w.denom())?);
    let c = Q::new(a, b);
    Some(if w.is_negative() { -c } else { c })
}

/// State of one Newton–Puiseux path: `x = s^ram` and
/// `y = prefix(s) + s^shift * Y` where `G(s, Y) = 0`.
#[derive(Clone)]
struct Stage {
    g: Biv,
    ram: u32,
    shift: u32,
    prefix: Vec<Q>,
}

fn x_series(ram: u32, len: usize) -> Vec<Q> {
    let mut x = vec![Q::zero(); len];
    if (ram as usize) < len {
        x[ram as usize] = Q::one();
    }
    x
}

/// `G(X^q, X^p (c + Y)) / X^h`.
fn transform(g: &Biv, p: u32, q: u32, c: &Q) -> Biv {
    let h = g.keys().map(|&(i, j)| q * i + p * j).min().unwrap_or(0);
    let mut out = Biv::new();
    for (&(i, j), a) in g {
        let base = q * i + p * j - h;
        let mut binom = BigInt::one();
        for k in 0..=j {
            let term = a * Q::from_integer(binom.clone()) * num_traits::pow(c.clone(), (j - k) as usize);
            let e = out.entry((base, k)).or_insert_with(Q::zero);
            *e += term;
            binom = binom * BigInt::from(j - k) / BigInt::from(k + 1);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

struct Expander {
    order: u32,
    out: Vec<PuiseuxBranch>,
}

impl Expander {
    fn len(&self) -> usize {
        self.order as usize + 1
    }

    fn finish(&mut self, stage: &Stage, tail: Option<Vec<Q>>) {
        let len = self.len();
        let mut y = stage.prefix.clone();
        y.resize(len, Q::zero());
        if let Some(tail) = tail {
            for (k, c) in tail.into_iter().enumerate() {
                let idx = k + stage.shift as usize;
                if idx < len {
                    y[idx] += c;
                }
            }
        }
        let x = x_series(stage.ram, len);
        self.out.push(PuiseuxBranch::from_series(stage.ram, x, y, self.order));
    }

    /// The unique series `Y(s)` with `Y(0) = 0` and `G(s, Y(s)) = 0`, when
    /// `∂G/∂Y(0, 0) != 0`.
    fn hensel(&self, g: &Biv, stage: &Stage) -> Vec<Q> {
        let len = (self.len()).saturating_sub(stage.shift as usize).max(1);
        let d = g.get(&(0, 1)).cloned().expect("simple root");
        let s = x_series(1, len);
        let mut y = vec![Q::zero(); len];
        for _ in 0..len {
            let r = eval_biv(g, &s, &y, len);
            if r.iter().all(Zero::is_zero) {
                break;
            }
            for (yk, rk) in y.iter_mut().zip(&r) {
                *yk -= rk / &d;
            }
        }
        y
    }

    fn expand(&mut self, stage: Stage, depth: usize) -> Result<()> {
        if depth > MAX_STAGES {
            return Err(Error::PuiseuxDiverged(MAX_STAGES));
        }
        let g = &stage.g;
        let pts: Vec<(u32, u32)> = g.keys().copied().collect();
        let min_j = pts.iter().map(|p| p.1).min().unwrap_or(0);
        if min_j >= 2 {
            return Err(Error::NotSquarefree);
        }
        if min_j == 1 {
            self.finish(&stage, None);
        }
        let vertices = hull(&pts);
        for w in vertices.windows(2) {
            let ((i1, j1), (i2, j2)) = (w[0], w[1]);
            let (di, dj) = (i2 - i1, j1 - j2);
            let gcd = di.gcd(&dj);
            let (p, q) = (di / gcd, dj / gcd);
            // Points on the edge: q*i + p*j = h, with j = j2 + k*q.
            let h = q * i1 + p * j1;
            let phi = UPoly::new(
                (0..=(j1 - j2) / q)
                    .map(|k| {
                        let j = j2 + k * q;
                        let num = h as i64 - (p * j) as i64;
                        if num < 0 || num % q as i64 != 0 {
                            return Q::zero();
                        }
                        g.get(&((num / q as i64) as u32, j)).cloned().unwrap_or_else(Q::zero)
                    })
                    .collect(),
            );
            let (roots, rest) = rational_roots(&phi);
            if rest.degree().unwrap_or(0) > 0 {
                return Err(Error::ExtensionRequired { poly: render_z(&rest) });
            }
            for (wv, mult) in roots {
                let c = rational_root(&wv, q).ok_or_else(|| {
                    let z = UPoly::new(
                        std::iter::once(-wv.clone())
                            .chain((1..q).map(|_| Q::zero()))
                            .chain(std::iter::once(Q::one()))
                            .collect(),
                    );
                    Error::ExtensionRequired { poly: render_z(&z) }
                })?;
                let g1 = transform(g, p, q, &c);
                let shift = stage.shift * q + p;
                let len = self.len();
                let mut prefix = vec![Q::zero(); len];
                for (k, a) in stage.prefix.iter().enumerate() {
                    if k * (q as usize) < len {
                        prefix[k * q as usize] = a.clone();
                    }
                }
                if (shift as usize) < len {
                    prefix[shift as usize] += &c;
                }
                let next = Stage { g: g1, ram: stage.ram * q, shift, prefix };
                if mult == 1 {
                    let tail = self.hensel(&next.g, &next);
                    self.finish(&next, Some(tail));
                } else {
                    self.expand(next, depth + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// All branches of `f = 0` through the origin, each truncated after
/// `t^order` and verified to that order.
pub fn puiseux_expand(f: &MPoly, order: u32) -> Result<Vec<PuiseuxBranch>> {
    let mult = multiplicity(f)?;
    if f.nvars() != 2 {
        return Err(Error::Arity { expected: 2, got: f.nvars() });
    }
    if order < mult {
        return Err(Error::InvalidArgument(format!("order {order} is below the multiplicity {mult}")));
    }
    if !is_squarefree(f) {
        return Err(Error::NotSquarefree);
    }
    let mut g = to_biv(f);
    let vertical = g.keys().all(|k| k.0 >= 1);
    if vertical {
        g = g.into_iter().map(|((i, j), a)| ((i - 1, j), a)).collect();
    }
    let mut ex = Expander { order, out: Vec::new() };
    if g.get(&(0, 0)).is_none() {
        ex.expand(Stage { g, ram: 1, shift: 0, prefix: Vec::new() }, 0)?;
    }
    if vertical {
        let len = ex.len();
        ex.out.push(PuiseuxBranch::from_series(0, vec![Q::zero(); len], x_series(1, len), order));
    }
    for b in &ex.out {
        if !verify_uniformization(f, b, order) {
            return Err(Error::PuiseuxDiverged(MAX_STAGES));
        }
    }
    Ok(ex.out)
}

pub fn branch_multiplicity_sum(branches: &[PuiseuxBranch]) -> u32 {
    branches.iter().map(PuiseuxBranch::multiplicity).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupData {
    /// `ord x` and `ord y` along the branch (a vanishing coordinate is
    /// omitted).
    pub generators: Vec<u32>,
    pub conductor: u32,
    pub bound: u32,
    /// Set when the parametrization is not monomial, so orders reached only
    /// by cancellation in linear combinations may be missing.
    pub bound_limited: bool,
}

/// Value semigroup generated by the orders of `x` and `y` on the single
/// branch, saturated up to `bound`, and its conductor.
pub fn semigroup_conductor(branches: &[PuiseuxBranch], bound: u32) -> Result<SemigroupData> {
    if branches.len() != 1 {
        return Err(Error::Multibranched(branches.len()));
    }
    let b = &branches[0];
    let mut gens: Vec<u32> = [series_order(&b.x), series_order(&b.y)].into_iter().flatten().collect();
    gens.sort();
    gens.dedup();
    let g = gens.iter().fold(0u32, |acc, &x| acc.gcd(&x));
    if g != 1 {
        return Err(Error::InvalidArgument(format!(
            "orders {gens:?} generate no numerical semigroup (gcd {g})"
        )));
    }
    let mut member = vec![false; bound as usize + 1];
    member[0] = true;
    for k in 1..=bound as usize {
        member[k] = gens.iter().any(|&s| s as usize <= k && member[k - s as usize]);
    }
    let mut conductor = bound;
    while conductor > 0 && member[conductor as usize - 1] {
        conductor -= 1;
    }
    let run = bound - conductor + 1;
    if run < gens[0] {
        return Err(Error::BoundTooSmall { bound });
    }
    let monomial = |s: &[Q]| s.iter().filter(|c| !c.is_zero()).count() <= 1;
    Ok(SemigroupData {
        generators: gens,
        conductor,
        bound,
        bound_limited: !(monomial(&b.x) && monomial(&b.y)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchReport {
    pub multiplicity: u32,
    pub branches: Vec<PuiseuxBranch>,
    pub semigroup: Option<SemigroupData>,
    pub multiplicity_sum: u32,
}

#[derive(Serialize)]
struct BranchDoc {
    r: u32,
    x: String,
    y: String,
    verified_to: u32,
    ramification: u32,
}

#[derive(Serialize)]
struct SemigroupDoc {
    gens: Vec<u32>,
    conductor: u32,
    bound: u32,
    bound_limited: bool,
}

#[derive(Serialize)]
struct ReportDoc {
    multiplicity: u32,
    branches: Vec<BranchDoc>,
    semigroup: Option<SemigroupDoc>,
    multiplicity_sum: u32,
}

impl BranchReport {
    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            multiplicity: self.multiplicity,
            branches: self
                .branches
                .iter()
                .map(|b| BranchDoc {
                    r: b.multiplicity(),
                    x: b.x_string(),
                    y: b.y_string(),
                    verified_to: b.order,
                    ramification: b.ramification,
                })
                .collect(),
            semigroup: self.semigroup.as_ref().map(|s| SemigroupDoc {
                gens: s.generators.clone(),
                conductor: s.conductor,
                bound: s.bound,
                bound_limited: s.bound_limited,
            }),
            multiplicity_sum: self.multiplicity_sum,
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

/// Multiplicity, branches and, for a single branch, the semigroup data.
pub fn branch_report(f: &MPoly, order: u32, bound: u32) -> Result<BranchReport> {
    let multiplicity = multiplicity(f)?;
    let branches = puiseux_expand(f, order)?;
    let semigroup = if branches.len() == 1 { Some(semigroup_conductor(&branches, bound)?) } else { None };
    let multiplicity_sum = branch_multiplicity_sum(&branches);
    Ok(BranchReport { multiplicity, branches, semigroup, multiplicity_sum })
}

/// Primes dividing the multiplicity of some branch.
pub fn primes_dividing_branches(branches: &[PuiseuxBranch], primes: &[u64]) -> Vec<u64> {
    primes
        .iter()
        .copied()
        .filter(|&p| branches.iter().any(|b| (b.multiplicity() as u64).is_multiple_of(p)))
        .collect()
}
