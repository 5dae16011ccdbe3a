//! Equation systems for generalized arcs.

mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use zetalab::counter::{count_points, CountOptions};
use zetalab::homsys::{
    auto_arc_system_for, build_auto_arc_system, build_nabla_system, satisfies, tautological_point, EquationSystem,
};
use zetalab::jetalg::{build_jet_algebra, BaseField};
use zetalab::symbolics::{parse_curve, parse_poly_in, MPoly};

const CURVES: [&str; 5] = ["y^2 - x^3", "x*y", "y^2 - x^2 - x^3", "y^3 - x^4", "y - x^2"];

fn opts() -> CountOptions {
    CountOptions { workers: 1, ..CountOptions::default() }
}

#[test]
fn affine_target_is_a_free_space() {
    for f in ["y^2 - x^3", "x*y"] {
        for n in 1..=3 {
            let alg = build_jet_algebra(&parse_curve(f).unwrap(), n, BaseField::Rational).unwrap();
            for vars in [vec!["a".to_string()], vec!["a".into(), "b".into(), "c".into()]] {
                let s = build_nabla_system(&alg, &vars, &[]).unwrap();
                assert!(s.equations().is_empty());
                for q in [2u64, 3] {
                    let expected = BigInt::from(q).pow((vars.len() * alg.length()) as u32);
                    assert_eq!(count_points(&s, q, &opts()).unwrap().count, expected);
                }
            }
        }
    }
}

#[test]
fn auto_arcs_fix_the_origin() {
    for f in CURVES {
        for n in 1..=3 {
            let s = build_auto_arc_system(&parse_curve(f).unwrap(), n).unwrap();
            for q in [2u64, 3, 5] {
                for v in ["x0", "y0"] {
                    // No solution has a nonzero constant term.
                    let unit = parse_poly_in(&format!("{v}^{} - 1", q - 1), s.unknowns()).unwrap();
                    let c = count_points(&s.with_equations([unit]).unwrap(), q, &opts()).unwrap().count;
                    assert_eq!(c, BigInt::from(0), "{f} n={n} q={q} {v}");
                }
            }
        }
    }
}

#[test]
fn identity_is_a_point() {
    for f in CURVES {
        for n in 1..=4 {
            let p = parse_curve(f).unwrap();
            let alg = build_jet_algebra(&p, n, BaseField::Rational).unwrap();
            let s = auto_arc_system_for(&p, &alg).unwrap();
            assert!(satisfies(&s, &tautological_point(&alg)), "{f} n={n}");
        }
    }
}

/// Nonzero equations reduced mod `p`, scaled to leading coefficient one.
fn normalized_mod(s: &EquationSystem, p: u64) -> Vec<Vec<(Vec<u32>, u64)>> {
    let pb = BigInt::from(p);
    let mut out: Vec<Vec<(Vec<u32>, u64)>> = s
        .equations()
        .iter()
        .filter_map(|e: &MPoly| {
            let mut ts: Vec<(Vec<u32>, u64)> = e
                .terms()
                .map(|(m, c)| (m.exps().to_vec(), c.mod_floor(&pb).try_into().unwrap()))
                .filter(|(_, c)| *c != 0)
                .collect();
            let lead = ts.last()?.1;
            let inv = (1..p).find(|i| i * lead % p == 1).unwrap();
            for t in ts.iter_mut() {
                t.1 = t.1 * inv % p;
            }
            ts.sort();
            Some(ts)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[test]
fn prime_field_systems_are_reductions() {
    for f in CURVES {
        let p = parse_curve(f).unwrap();
        for n in 1..=4 {
            let alg = build_jet_algebra(&p, n, BaseField::Rational).unwrap();
            let z = auto_arc_system_for(&p, &alg).unwrap();
            for q in [2u64, 3, 5, 7] {
                if alg.bad_primes().contains(&q) {
                    continue;
                }
                let fp = auto_arc_system_for(&p, &build_jet_algebra(&p, n, BaseField::Prime(q)).unwrap()).unwrap();
                assert_eq!(normalized_mod(&fp, q), normalized_mod(&z, q), "{f} n={n} q={q}");
            }
        }
    }
}

#[test]
fn json_round_trip_on_level_systems() {
    for f in CURVES {
        let s = build_auto_arc_system(&parse_curve(f).unwrap(), 3).unwrap();
        let back = EquationSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), s.to_json());
    }
}
