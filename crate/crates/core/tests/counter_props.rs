//! The pruned counter against enumeration and structural laws.

mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use zetalab::counter::{count_points, CountOptions, DEFAULT_BUDGET};
use zetalab::error::Error;
use zetalab::homsys::{build_auto_arc_system, EquationSystem, SystemMeta};
use zetalab::symbolics::{parse_curve, MPoly};

fn opts(workers: usize) -> CountOptions {
    CountOptions { workers, budget: DEFAULT_BUDGET }
}

fn count(s: &EquationSystem, q: u64, w: usize) -> BigInt {
    count_points(s, q, &opts(w)).unwrap().count
}

/// Both systems side by side on disjoint unknowns.
fn disjoint_union(a: &EquationSystem, b: &EquationSystem) -> EquationSystem {
    let mut vars: Vec<String> = a.unknowns().iter().map(|v| format!("a_{v}")).collect();
    vars.extend(b.unknowns().iter().map(|v| format!("b_{v}")));
    let (ka, kb) = (a.unknowns().len(), b.unknowns().len());
    let lift = |e: &MPoly, left: bool| {
        MPoly::from_terms(
            vars.clone(),
            e.terms().map(|(m, c)| {
                let mut ex = vec![0; ka + kb];
                let off = if left { 0 } else { ka };
                ex[off..off + m.exps().len()].copy_from_slice(m.exps());
                (ex, c.clone())
            }),
        )
    };
    let eqs = a.equations().iter().map(|e| lift(e, true)).chain(b.equations().iter().map(|e| lift(e, false))).collect();
    let meta = SystemMeta { source: "sum".into(), target: "sum".into(), n: 0, length: 0, bad_primes: Vec::new() };
    EquationSystem::new(vars, eqs, meta).unwrap()
}

#[test]
fn cusp_levels_four_and_five_match_enumeration() {
    let f = parse_curve("y^2 - x^3").unwrap();
    for (n, expected) in [(4u32, 768u64), (5, 3072)] {
        let s = build_auto_arc_system(&f, n).unwrap();
        assert_eq!(common::naive_count(&s, 2), expected);
        assert_eq!(count(&s, 2, 1), BigInt::from(expected));
    }
}

#[test]
fn budget_is_enforced() {
    let s = build_auto_arc_system(&parse_curve("y^2 - x^3").unwrap(), 3).unwrap();
    let r = count_points(&s, 17, &CountOptions { workers: 1, budget: 1 });
    assert!(matches!(r, Err(Error::BudgetExceeded(1))));
}

#[test]
fn workers_do_not_change_level_counts() {
    for f in ["y^2 - x^3", "x*y", "y^3 - x^4"] {
        let s = build_auto_arc_system(&parse_curve(f).unwrap(), 3).unwrap();
        for q in [5u64, 7] {
            let one = count(&s, q, 1);
            assert_eq!(count(&s, q, 2), one);
            assert_eq!(count(&s, q, 8), one);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pruned_count_matches_enumeration(s in common::small_system(6), q in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(q.pow(s.unknowns().len() as u32) <= 1 << 20);
        let naive = BigInt::from(common::naive_count(&s, q));
        for w in [1, 2, 8] {
            prop_assert_eq!(count(&s, q, w), naive.clone());
        }
    }

    #[test]
    fn adding_an_equation_never_increases_the_count(s in common::small_system(4), extra in common::small_system(4), q in prop::sample::select(vec![2u64, 3, 5])) {
        let k = s.unknowns().len();
        let more: Vec<MPoly> = extra
            .equations()
            .iter()
            .filter(|e| e.nvars() <= k)
            .map(|e| MPoly::from_terms(s.unknowns().to_vec(), e.terms().map(|(m, c)| {
                let mut ex = m.exps().to_vec();
                ex.resize(k, 0);
                (ex, c.clone())
            })))
            .collect();
        let bigger = s.with_equations(more).unwrap();
        prop_assert!(count(&bigger, q, 1) <= count(&s, q, 1));
    }

    #[test]
    fn disjoint_blocks_multiply(a in common::small_system(3), b in common::small_system(3), q in prop::sample::select(vec![2u64, 3, 5])) {
        let u = disjoint_union(&a, &b);
        prop_assert_eq!(count(&u, q, 2), count(&a, q, 1) * count(&b, q, 1));
    }
}
