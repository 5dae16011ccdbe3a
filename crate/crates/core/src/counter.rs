//! Exact `F_q`-point counts of equation systems by pruned backtracking.
//!
//! The search keeps every equation as a residual polynomial in the still
//! unassigned unknowns. A residual that becomes a nonzero constant kills the
//! subtree; unknowns that no residual mentions contribute a factor `q` each
//! without being enumerated; a residual in a single unknown restricts that
//! unknown to its roots.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::homsys::{auto_arc_system_for, build_nabla_system, EquationSystem};
use crate::jetalg::{build_jet_algebra, BaseField, JetAlgebra};
use crate::symbolics::fp::{int_mod, inv_mod, is_prime, MAX_MODULUS};
use crate::symbolics::MPoly;

pub const DEFAULT_BUDGET: u64 = 10_000_000_000;

/// Largest field size for which candidate roots are found by evaluation at
/// every element.
const SCAN_LIMIT: u64 = 4096;

/// Nodes a worker visits between updates of the shared budget.
const FLUSH_EVERY: u64 = 1024;

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub workers: usize,
    pub budget: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        CountOptions { workers, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub q: u64,
    pub count: BigInt,
    pub nodes: u64,
    pub elapsed: Duration,
    pub partitions: usize,
}

/// Snapshot passed to progress callbacks after each finished partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progress {
    pub nodes: u64,
    pub partitions_done: usize,
    pub partitions: usize,
}

type Mono = SmallVec<[(u16, u16); 4]>;

#[derive(Clone, Debug)]
struct Term {
    mono: Mono,
    coeff: u64,
}

type Poly = Vec<Term>;

#[derive(Clone)]
struct Node {
    residuals: Vec<Poly>,
    assigned: Vec<bool>,
    weight: u128,
}

struct Search<'a> {
    q: u64,
    nvars: usize,
    budget: u64,
    used: &'a AtomicU64,
    abort: &'a AtomicBool,
}

struct Meter<'s, 'a> {
    search: &'s Search<'a>,
    local: u64,
}

impl Meter<'_, '_> {
    fn tick(&mut self) -> Result<()> {
        self.local += 1;
        if self.local >= FLUSH_EVERY {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let total = self.search.used.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.search.budget {
            self.search.abort.store(true, Ordering::Relaxed);
        }
        if self.search.abort.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded(self.search.budget));
        }
        Ok(())
    }
}

fn q_pow(q: u64, k: usize) -> Result<u128> {
    (0..k).try_fold(1u128, |acc, _| acc.checked_mul(q as u128)).ok_or(Error::CountOverflow)
}

/// Exponent with the same values on `F_q`: `v^e = v^(((e - 1) mod (q - 1)) + 1)`.
fn fermat_exponent(e: u32, q: u64) -> u16 {
    let e = e as u64;
    if e < q {
        e as u16
    } else {
        (((e - 1) % (q - 1)) + 1) as u16
    }
}

fn reduce_system(s: &EquationSystem, q: u64) -> Vec<Poly> {
    s.equations()
        .iter()
        .map(|eq| {
            let terms = eq.terms().filter_map(|(m, c)| {
                let coeff = int_mod(c, q);
                (coeff != 0).then(|| Term {
                    mono: m
                        .exps()
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(v, &e)| (v as u16, fermat_exponent(e, q)))
                        .collect(),
                    coeff,
                })
            });
            merge(terms.collect(), q)
        })
        .collect()
}

/// Sort by monomial and combine like terms, dropping zeros.
fn merge(mut terms: Vec<Term>, q: u64) -> Poly {
    terms.sort_unstable_by(|a, b| a.mono.cmp(&b.mono));
    let mut out: Poly = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.mono == t.mono => last.coeff = (last.coeff + t.coeff) % q,
            _ => out.push(t),
        }
        if out.last().is_some_and(|l| l.coeff == 0) {
            out.pop();
        }
    }
    out
}

fn substitute(p: &Poly, v: u16, powers: &[u64], q: u64) -> Poly {
    let mut touched = false;
    let mut terms: Vec<Term> = Vec::with_capacity(p.len());
    for t in p {
        match t.mono.iter().position(|&(w, _)| w == v) {
            None => terms.push(t.clone()),
            Some(i) => {
                touched = true;
                let c = t.coeff * powers[t.mono[i].1 as usize] % q;
                if c != 0 {
                    let mut mono = t.mono.clone();
                    mono.remove(i);
                    terms.push(Term { mono, coeff: c });
                }
            }
        }
    }
    if touched {
        merge(terms, q)
    } else {
        terms
    }
}

impl Search<'_> {
    /// Drop satisfied residuals, detect contradictions, and absorb unknowns
    /// no residual mentions. `false` means the node has no solutions.
    fn normalize(&self, node: &mut Node) -> Result<bool> {
        node.residuals.retain(|p| !p.is_empty());
        if node.residuals.iter().any(|p| p.len() == 1 && p[0].mono.is_empty()) {
            return Ok(false);
        }
        let mut support = vec![false; self.nvars];
        for p in &node.residuals {
            for t in p {
                for &(v, _) in &t.mono {
                    support[v as usize] = true;
                }
            }
        }
        let mut free = 0;
        for (a, s) in node.assigned.iter_mut().zip(&support) {
            if !*a && !*s {
                *a = true;
                free += 1;
            }
        }
        node.weight = node.weight.checked_mul(q_pow(self.q, free)?).ok_or(Error::CountOverflow)?;
        Ok(true)
    }

    /// The unknown to branch on and its candidate values.
    fn choose(&self, node: &Node) -> (u16, Vec<u64>) {
        let mut best: Option<(u16, u16, usize)> = None;
        for (k, p) in node.residuals.iter().enumerate() {
            let Some(v) = univariate_var(p) else { continue };
            let deg = p.last().map_or(0, |t| t.mono.first().map_or(0, |m| m.1));
            if best.is_none_or(|(bv, bd, _)| (v, deg) < (bv, bd)) {
                best = Some((v, deg, k));
            }
        }
        if let Some((v, deg, k)) = best {
            let mut dense = vec![0u64; deg as usize + 1];
            for t in &node.residuals[k] {
                dense[t.mono.first().map_or(0, |m| m.1 as usize)] = t.coeff;
            }
            return (v, roots_mod(&dense, self.q));
        }
        let v = node
            .residuals
            .iter()
            .flat_map(|p| p.iter().filter_map(|t| t.mono.first().map(|m| m.0)))
            .min()
            .expect("a nonconstant residual");
        (v, (0..self.q).collect())
    }

    fn child(&self, node: &Node, v: u16, value: u64) -> Result<Option<Node>> {
        let top = node
            .residuals
            .iter()
            .flat_map(|p| p.iter().flat_map(|t| t.mono.iter().filter(|m| m.0 == v).map(|m| m.1)))
            .max()
            .unwrap_or(0);
        let mut powers = Vec::with_capacity(top as usize + 1);
        let mut x = 1u64;
        for _ in 0..=top {
            powers.push(x);
            x = x * value % self.q;
        }
        let mut assigned = node.assigned.clone();
        assigned[v as usize] = true;
        let mut out = Node {
            residuals: node.residuals.iter().map(|p| substitute(p, v, &powers, self.q)).collect(),
            assigned,
            weight: node.weight,
        };
        Ok(if self.normalize(&mut out)? { Some(out) } else { None })
    }

    fn children(&self, node: &Node) -> Result<Vec<Node>> {
        let (v, cands) = self.choose(node);
        let mut out = Vec::with_capacity(cands.len());
        for value in cands {
            if let Some(c) = self.child(node, v, value)? {
                out.push(c);
            }
        }
        Ok(out)
    }

    fn dfs(&self, node: &Node, meter: &mut Meter<'_, '_>) -> Result<u128> {
        meter.tick()?;
        if node.residuals.is_empty() {
            return Ok(node.weight);
        }
        let (v, cands) = self.choose(node);
        let mut sum = 0u128;
        for value in cands {
            if let Some(c) = self.child(node, v, value)? {
                sum = sum.checked_add(self.dfs(&c, meter)?).ok_or(Error::CountOverflow)?;
            }
        }
        Ok(sum)
    }
}

/// `v` if every nonconstant term of `p` is a power of the single unknown `v`.
fn univariate_var(p: &Poly) -> Option<u16> {
    let mut var = None;
    for t in p {
        match t.mono.len() {
            0 => {}
            1 => match var {
                None => var = Some(t.mono[0].0),
                Some(v) if v == t.mono[0].0 => {}
                Some(_) => return None,
            },
            _ => return None,
        }
    }
    var
}

/// Distinct roots in `F_q` of a dense polynomial (low degree first).
pub fn roots_mod(coeffs: &[u64], q: u64) -> Vec<u64> {
    let f = trim(coeffs.iter().map(|c| c % q).collect());
    if f.is_empty() {
        return (0..q).collect();
    }
    if q <= SCAN_LIMIT {
        return (0..q)
            .filter(|&x| f.iter().rev().fold(0, |acc, &c| (acc * x + c) % q) == 0)
            .collect();
    }
    // Split gcd(f, x^q - x), a product of distinct linear factors.
    let xq = poly_powmod(&[0, 1], q, &f, q);
    let mut xq_minus_x = xq;
    xq_minus_x.resize(xq_minus_x.len().max(2), 0);
    xq_minus_x[1] = (xq_minus_x[1] + q - 1) % q;
    let g = poly_gcd(trim(xq_minus_x), f.clone(), q);
    let mut roots = Vec::new();
    split_linear(g, q, 0, &mut roots);
    roots.sort_unstable();
    roots
}

fn trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], q);
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let c = r[k] * inv % q;
        if c != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let idx = k - db + i;
                r[idx] = (r[idx] + q - c * bi % q) % q;
            }
        }
        r = trim(r);
        if r.len() == k + 1 {
            r.pop();
        }
    }
    trim(r)
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y % q) % q;
        }
    }
    poly_rem(&trim(out), m, q)
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], q: u64) -> Vec<u64> {
    let mut acc = poly_rem(&[1], m, q);
    let mut b = poly_rem(base, m, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, q);
        }
        b = poly_mulmod(&b, &b, m, q);
        e >>= 1;
    }
    acc
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, q: u64) -> Vec<u64> {
    while !b.is_empty() {
        let r = poly_rem(&a, &b, q);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, q);
        for c in a.iter_mut() {
            *c = *c * inv % q;
        }
    }
    a
}

/// Roots of a monic squarefree product of linear factors, by gcds with
/// `(x + a)^((q-1)/2) - 1` for increasing shifts `a`.
fn split_linear(g: Vec<u64>, q: u64, mut shift: u64, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            out.push((q - g[0]) % q);
            return;
        }
        _ => {}
    }
    loop {
        let h = poly_powmod(&[shift % q, 1], (q - 1) / 2, &g, q);
        let mut h = if h.is_empty() { vec![q - 1] } else { h };
        h[0] = (h[0] + q - 1) % q;
        let d = poly_gcd(trim(h), g.clone(), q);
        shift += 1;
        if d.len() > 1 && d.len() < g.len() {
            let rest = poly_div_exact(&g, &d, q);
            split_linear(d, q, shift, out);
            split_linear(rest, q, shift, out);
            return;
        }
    }
}

fn poly_div_exact(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], q);
    let mut quot = vec![0u64; a.len() - db];
    for k in (db..a.len()).rev() {
        let c = r[k] * inv % q;
        quot[k - db] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[k - db + i] = (r[k - db + i] + q - c * bi % q) % q;
        }
    }
    trim(quot)
}

/// Number of `F_q`-solutions of `s`.
pub fn count_points(s: &EquationSystem, q: u64, opts: &CountOptions) -> Result<CountResult> {
    count_points_with_progress(s, q, opts, &|_| {})
}

pub fn count_points_with_progress(
    s: &EquationSystem,
    q: u64,
    opts: &CountOptions,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<CountResult> {
    if !is_prime(q) || q > MAX_MODULUS {
        return Err(Error::InvalidArgument(format!("{q} is not a prime <= 2^31")));
    }
    if opts.workers == 0 {
        return Err(Error::InvalidArgument("at least one worker is required".into()));
    }
    let nvars = s.unknowns().len();
    if nvars > u16::MAX as usize {
        return Err(Error::InvalidArgument("too many unknowns".into()));
    }
    let start = Instant::now();
    let used = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let search = Search { q, nvars, budget: opts.budget, used: &used, abort: &abort };

    let mut root = Node { residuals: reduce_system(s, q), assigned: vec![false; nvars], weight: 1 };
    let mut total = 0u128;
    let mut frontier = VecDeque::new();
    if search.normalize(&mut root)? {
        frontier.push_back(root);
    }
    let wanted = 4 * opts.workers;
    {
        let mut meter = Meter { search: &search, local: 0 };
        while frontier.len() < wanted {
            let Some(node) = frontier.pop_front() else { break };
            meter.tick()?;
            if node.residuals.is_empty() {
                total = total.checked_add(node.weight).ok_or(Error::CountOverflow)?;
                continue;
            }
            frontier.extend(search.children(&node)?);
        }
        meter.flush()?;
    }

    let tasks: Vec<Node> = frontier.into();
    let partitions = tasks.len();
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<u128>>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.min(partitions.max(1)) {
            scope.spawn(|| {
                let mut meter = Meter { search: &search, local: 0 };
                let mut sum = Ok(0u128);
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= partitions {
                        break;
                    }
                    let r = search.dfs(&tasks[i], &mut meter);
                    sum = match (sum, r) {
                        (Ok(a), Ok(b)) => a.checked_add(b).ok_or(Error::CountOverflow),
                        (Err(e), _) | (_, Err(e)) => Err(e),
                    };
                    if sum.is_err() {
                        abort.store(true, Ordering::Relaxed);
                        break;
                    }
                    let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                    progress(Progress {
                        nodes: used.load(Ordering::Relaxed) + meter.local,
                        partitions_done: finished,
                        partitions,
                    });
                }
                if sum.is_ok() {
                    if let Err(e) = meter.flush() {
                        sum = Err(e);
                    }
                } else {
                    used.fetch_add(meter.local, Ordering::Relaxed);
                }
                results.lock().unwrap().push(sum);
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    // Report budget exhaustion in preference to secondary failures.
    results.sort_by_key(|r| !matches!(r, Err(Error::BudgetExceeded(_))));
    for r in results {
        total = total.checked_add(r?).ok_or(Error::CountOverflow)?;
    }
    Ok(CountResult {
        q,
        count: BigInt::from(total),
        nodes: used.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
        partitions,
    })
}

/// Points of the auto-arc space of `f` at level `n` over `F_q`. At primes
/// where the rational jet algebra does not reduce, the algebra is rebuilt
/// over `F_q`.
pub fn count_auto_arc(f: &MPoly, n: u32, q: u64, opts: &CountOptions) -> Result<CountResult> {
    let alg = jet_algebra_at(f, n, q)?;
    let sys = auto_arc_system_for(f, &alg)?;
    count_points(&sys, q, opts)
}

/// Points over `F_q` of the morphisms from the fat point of `alg` into the
/// affine scheme `V(generators)` in the ambient variables `vars`.
pub fn count_nabla(
    alg: &JetAlgebra,
    vars: &[String],
    generators: &[MPoly],
    q: u64,
    opts: &CountOptions,
) -> Result<CountResult> {
    let sys = build_nabla_system(alg, vars, generators)?;
    count_points(&sys, q, opts)
}

/// The jet algebra of `f` whose integer system is valid at `q`.
pub fn jet_algebra_at(f: &MPoly, n: u32, q: u64) -> Result<JetAlgebra> {
    let alg = build_jet_algebra(f, n, BaseField::Rational)?;
    if alg.bad_primes().contains(&q) {
        build_jet_algebra(f, n, BaseField::Prime(q))
    } else {
        Ok(alg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homsys::build_auto_arc_system;
    use crate::symbolics::fp::pow_mod;
    use crate::symbolics::parse_curve;

    fn one_worker() -> CountOptions {
        CountOptions { workers: 1, budget: DEFAULT_BUDGET }
    }

    /// Full enumeration over `F_q^k`.
    fn naive(s: &EquationSystem, q: u64) -> u64 {
        let k = s.unknowns().len();
        let total = q.pow(k as u32);
        let mut hits = 0;
        let mut point = vec![crate::symbolics::FpElem::new(0, q); k];
        for code in 0..total {
            let mut c = code;
            for x in point.iter_mut() {
                *x = crate::symbolics::FpElem::new((c % q) as i64, q);
                c /= q;
            }
            if s.equations().iter().all(|e| e.eval_fp(&point).unwrap().is_zero()) {
                hits += 1;
            }
        }
        hits
    }

    #[test]
    fn cusp_small_cells_match_enumeration() {
        let f = parse_curve("y^2 - x^3").unwrap();
        for (n, q) in [(1u32, 2u64), (1, 5), (2, 2), (2, 3), (3, 2)] {
            let s = build_auto_arc_system(&f, n).unwrap();
            let c = count_points(&s, q, &one_worker()).unwrap();
            assert_eq!(c.count, BigInt::from(naive(&s, q)), "n = {n}, q = {q}");
        }
        let s2 = build_auto_arc_system(&f, 2).unwrap();
        assert_eq!(count_points(&s2, 3, &one_worker()).unwrap().count, BigInt::from(81));
        let s3 = build_auto_arc_system(&f, 3).unwrap();
        assert_eq!(count_points(&s3, 2, &one_worker()).unwrap().count, BigInt::from(128));
    }

    #[test]
    fn roots_by_splitting_match_scanning() {
        let q = 10007;
        // (x - 3)(x - 5)(x - 9000)(x^2 + 1), and x^2 + 1 has roots iff q = 1 mod 4.
        let lin = [3u64, 5, 9000];
        let mut f = vec![1u64, 0, 1];
        for r in lin {
            let mut g = vec![0u64; f.len() + 1];
            for (i, &c) in f.iter().enumerate() {
                g[i + 1] = (g[i + 1] + c) % q;
                g[i] = (g[i] + q - r * c % q) % q;
            }
            f = g;
        }
        let roots = roots_mod(&f, q);
        let scanned: Vec<u64> = (0..q)
            .filter(|&x| f.iter().rev().fold(0, |acc, &c| (acc * x + c) % q) == 0)
            .collect();
        assert_eq!(roots, scanned);
        assert_eq!(roots_mod(&[0], 7), (0..7).collect::<Vec<_>>());
        assert_eq!(roots_mod(&[1], 7), Vec::<u64>::new());
    }

    #[test]
    fn fermat_reduction_preserves_values() {
        for q in [2u64, 3, 5, 7] {
            for e in 1..20u32 {
                let r = fermat_exponent(e, q) as u64;
                for x in 0..q {
                    assert_eq!(pow_mod(x, e as u64, q), pow_mod(x, r, q));
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let s = build_auto_arc_system(&f, 3).unwrap();
        let opts = CountOptions { workers: 2, budget: 3 };
        assert_eq!(count_points(&s, 5, &opts).unwrap_err(), Error::BudgetExceeded(3));
    }

    #[test]
    fn rejects_composite_moduli() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let s = build_auto_arc_system(&f, 2).unwrap();
        assert!(matches!(count_points(&s, 4, &one_worker()), Err(Error::InvalidArgument(_))));
    }
}
