//! Oracles shared by the integration tests. None of them call into the
//! counting or series code they check.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use zetalab::homsys::{EquationSystem, SystemMeta};
use zetalab::symbolics::MPoly;

/// Full enumeration of `F_q^k`, evaluating every term by hand.
pub fn naive_count(s: &EquationSystem, q: u64) -> u64 {
    let k = s.unknowns().len();
    let eqs: Vec<Vec<(Vec<u32>, u64)>> = s
        .equations()
        .iter()
        .map(|e| {
            e.terms()
                .map(|(m, c)| (m.exps().to_vec(), c.mod_floor(&BigInt::from(q)).to_u64().unwrap()))
                .collect()
        })
        .collect();
    let total = q.pow(k as u32);
    let mut point = vec![0u64; k];
    let mut hits = 0;
    for code in 0..total {
        let mut c = code;
        for x in point.iter_mut() {
            *x = c % q;
            c /= q;
        }
        let zero = eqs.iter().all(|terms| {
            terms.iter().fold(0u64, |acc, (e, c)| {
                let v = e.iter().zip(&point).fold(*c, |v, (&a, &x)| v * x.pow(a) % q);
                (acc + v) % q
            }) == 0
        });
        hits += zero as u64;
    }
    hits
}

/// Coefficients of `L^-1 + L t + L^2 t^2 + ((L^7 - L^6) t^3 + L^7 t^4 + L^7 t^7) / ((1 - L t^3)(1 - t))`
/// at `L = q`, by long division of power series over `ℚ`.
pub fn cusp_series_at(q: i64, len: usize) -> Vec<BigRational> {
    let l = |e: u32| BigRational::from_integer(BigInt::from(q).pow(e));
    let mut num = vec![BigRational::zero(); len.max(8)];
    num[3] = l(7) - l(6);
    num[4] = l(7);
    num[7] = l(7);
    let mut den = vec![BigRational::zero(); 5];
    den[0] = l(0);
    den[1] = -l(0);
    den[3] = -l(1);
    den[4] = l(1);
    let mut out = vec![BigRational::zero(); len];
    for k in 0..len {
        let mut v = num[k].clone();
        for j in 1..den.len().min(k + 1) {
            v -= &den[j] * &out[k - j];
        }
        out[k] = v;
    }
    out[0] += BigRational::new(1.into(), q.into());
    if len > 1 {
        out[1] += l(1);
    }
    if len > 2 {
        out[2] += l(2);
    }
    out
}

/// `ℓ(J^n)` of the cusp: monomials of degree `< n` not divisible by `y^2`.
pub fn cusp_length(n: u32) -> usize {
    (0..n).map(|d| if d == 0 { 1 } else { 2 }).sum()
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("u{i}")).collect()
}

/// Small random systems over `k` unknowns with coefficients in `-3..=3`.
pub fn small_system(max_unknowns: usize) -> impl Strategy<Value = EquationSystem> {
    (1..=max_unknowns).prop_flat_map(|k| {
        let term = (prop::collection::vec(0u32..=3, k), -3i64..=3);
        let eq = prop::collection::vec(term, 1..=4);
        prop::collection::vec(eq, 0..=3).prop_map(move |eqs| {
            let vars = names(k);
            let polys: Vec<MPoly> = eqs
                .into_iter()
                .map(|ts| MPoly::from_terms(vars.clone(), ts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
                .filter(|p| !p.is_zero())
                .collect();
            let meta = SystemMeta {
                source: "random".into(),
                target: "random".into(),
                n: 0,
                length: k,
                bad_primes: Vec::new(),
            };
            EquationSystem::new(vars, polys, meta).unwrap()
        })
    })
}
