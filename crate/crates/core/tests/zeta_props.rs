//! Assembled truncations against counts and the closed form.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use zetalab::counter::CountOptions;
use zetalab::symbolics::{parse_curve, parse_lt_expr, ClassPoly};
use zetalab::zeta::{theta_truncation, verify_decomposition, zeta_truncation, Mode, Space};

const CUSP_FORM: &str = "L^-1 + L*t + L^2*t^2 + ((L^7-L^6)*t^3+L^7*t^4+L^7*t^7)/((1-L*t^3)*(1-t))";
const CURVES: [&str; 6] = ["y^2 - x^3", "x*y", "y^2 - x^2 - x^3", "y^3 - x^4", "y - x^2", "y - x"];

fn opts() -> CountOptions {
    CountOptions { workers: 1, ..CountOptions::default() }
}

#[test]
fn first_coefficient_is_always_l_inverse() {
    for f in CURVES {
        let rep = zeta_truncation(&parse_curve(f).unwrap(), 2, &[2, 3, 5], &Mode::Fit, &opts()).unwrap();
        assert_eq!(rep.rows[0].coeff, Some(ClassPoly::l_pow(-1)), "{f}");
        assert!(rep.rows[0].certain);
    }
}

#[test]
fn verified_rows_reproduce_every_count() {
    let form = parse_lt_expr(CUSP_FORM).unwrap();
    let rep = zeta_truncation(&parse_curve("y^2 - x^3").unwrap(), 3, &[2, 3, 5, 7], &Mode::Verify(form), &opts()).unwrap();
    assert!(rep.all_verified());
    for row in &rep.rows {
        let c = row.coeff.as_ref().unwrap();
        for (q, count) in &row.counts {
            let scale = BigRational::from_integer(BigInt::from(*q).pow(row.length as u32));
            assert_eq!(c.eval_int(*q).unwrap() * scale, BigRational::from_integer(count.clone()), "n={} q={q}", row.n);
            let oracle = common::cusp_series_at(*q as i64, row.n as usize)[row.n as usize - 1].clone();
            assert_eq!(c.eval_int(*q).unwrap(), oracle);
        }
    }
}

#[test]
fn fits_are_consistent_across_primes() {
    for f in ["y^2 - x^3", "y^2 - x^2 - x^3", "y - x^2"] {
        let rep = zeta_truncation(&parse_curve(f).unwrap(), 3, &[2, 3, 5, 7, 11, 13, 17], &Mode::Fit, &opts()).unwrap();
        for row in &rep.rows {
            assert!(row.verified && row.finding.is_none(), "{f} n={}: {:?}", row.n, row.finding);
            // Only primes flagged up front may be set aside.
            assert!(row.excluded_primes.iter().all(|q| row.flagged_primes.contains(q)));
            let class = row.class.as_ref().unwrap();
            for (q, count) in row.counts.iter().filter(|(q, _)| !row.excluded_primes.contains(q)) {
                assert_eq!(class.eval_int(*q).unwrap(), BigRational::from_integer(count.clone()));
            }
        }
    }
}

#[test]
fn nodal_cubic_sets_characteristic_two_aside() {
    // In characteristic two the nodal cubic is a cusp.
    let rep = zeta_truncation(&parse_curve("y^2 - x^2 - x^3").unwrap(), 3, &[2, 3, 5, 7, 11, 13, 17], &Mode::Fit, &opts()).unwrap();
    let row = &rep.rows[2];
    assert_eq!(row.excluded_primes, [2]);
    assert_eq!(row.counts[&2], BigInt::from(128));
    let node = zeta_truncation(&parse_curve("x*y").unwrap(), 3, &[3, 5, 7], &Mode::Fit, &opts()).unwrap();
    for q in [3u64, 5, 7] {
        assert_eq!(row.counts[&q], node.rows[2].counts[&q]);
    }
}

#[test]
fn cusp_fit_agrees_with_the_closed_form_through_level_three() {
    let form = parse_lt_expr(CUSP_FORM).unwrap().series(3).unwrap();
    let rep = zeta_truncation(&parse_curve("y^2 - x^3").unwrap(), 3, &[2, 3, 5, 7, 11, 13, 17], &Mode::Fit, &opts()).unwrap();
    assert_eq!(rep.truncation().unwrap(), form);
}

#[test]
fn decomposition_holds_on_the_cusp_grid() {
    let cells = verify_decomposition(&parse_curve("y^2 - x^3").unwrap(), 3, &[2, 3, 5], &opts()).unwrap();
    assert_eq!(cells.len(), 9);
    assert!(cells.iter().all(|c| c.holds));
    let node = verify_decomposition(&parse_curve("x*y").unwrap(), 3, &[2, 3], &opts()).unwrap();
    assert!(node.iter().all(|c| c.holds));
}

#[test]
fn even_subseries_takes_even_indices() {
    let mut rep = zeta_truncation(&parse_curve("y^2 - x^3").unwrap(), 3, &[2, 3, 5, 7, 11, 13, 17], &Mode::Fit, &opts()).unwrap();
    let full = rep.truncation().unwrap();
    let even = rep.extract_subseries(2, 0).unwrap().clone();
    assert_eq!(even.coeffs(), &[full.coeff(0).clone(), full.coeff(2).clone()]);
}

#[test]
fn smooth_theta_is_the_affine_line() {
    // Every morphism from a fat point into a line is free in the line's direction.
    let f = parse_curve("y - x^2").unwrap();
    for space in [Space::CurveJets, Space::ClassicalJets] {
        let rep = theta_truncation(&f, space, 3, &[2, 3, 5], &Mode::Verify(parse_lt_expr("1/(1-t)").unwrap()), &opts()).unwrap();
        assert!(rep.all_verified(), "{space:?}");
    }
}
