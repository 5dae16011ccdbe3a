//! Exact arithmetic: finite fields, polynomials, classes in `L`, rational
//! functions in `t` and the text grammar for all of them.

pub mod classpoly;
pub mod fp;
pub mod interp;
pub mod lfrac;
pub mod mpoly;
pub mod parse;
pub mod ring;
pub mod series;
pub mod upoly;

pub use classpoly::ClassPoly;
pub use fp::{first_primes, is_prime, FpElem};
pub use interp::{interpolate_class_poly, ClassFit};
pub use lfrac::LFrac;
pub use mpoly::{MPoly, Monomial};
pub use parse::{parse_curve, parse_lt_expr, parse_poly, parse_poly_in};
pub use series::{pade_reconstruct, RationalFn, TPoly, ZetaTruncation};
pub use upoly::UPoly;
