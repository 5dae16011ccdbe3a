//! Polynomial systems whose solutions over a field are the morphisms from a
//! fat point into an affine target: generalized arc spaces and auto-arc
//! spaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jetalg::{build_jet_algebra, BaseField, JetAlgebra};
use crate::symbolics::parse::parse_poly_in;
use crate::symbolics::MPoly;

/// Provenance of a system, carried through serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemMeta {
    pub source: String,
    pub target: String,
    pub n: u32,
    /// Length of the source fat point.
    pub length: usize,
    /// Primes at which the integer system is not the reduction of the
    /// source algebra.
    pub bad_primes: Vec<u64>,
}

/// Equations over `ℤ` in an ordered list of unknowns. Unknown `k_a` is the
/// coefficient of basis element `e_a` in the image of ambient variable `k`;
/// unknowns are interleaved by basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationSystem {
    unknowns: Vec<String>,
    equations: Vec<MPoly>,
    meta: SystemMeta,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    unknowns: Vec<String>,
    equations: Vec<String>,
    meta: SystemMeta,
}

impl EquationSystem {
    pub fn new(unknowns: Vec<String>, equations: Vec<MPoly>, meta: SystemMeta) -> Result<Self> {
        if equations.iter().any(|e| e.vars() != unknowns.as_slice()) {
            return Err(Error::VariableMismatch);
        }
        Ok(EquationSystem { unknowns, equations, meta })
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn equations(&self) -> &[MPoly] {
        &self.equations
    }

    pub fn meta(&self) -> &SystemMeta {
        &self.meta
    }

    /// Append equations; used to build conditioned subsystems in tests and
    /// diagnostics.
    pub fn with_equations(&self, extra: impl IntoIterator<Item = MPoly>) -> Result<Self> {
        let mut eqs = self.equations.clone();
        eqs.extend(extra.into_iter().filter(|e| !e.is_zero()));
        EquationSystem::new(self.unknowns.clone(), eqs, self.meta.clone())
    }

    pub fn to_json(&self) -> String {
        let doc = SystemDoc {
            unknowns: self.unknowns.clone(),
            equations: self.equations.iter().map(ToString::to_string).collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("system JSON: {e}")))?;
        let equations = doc
            .equations
            .iter()
            .map(|e| parse_poly_in(e, &doc.unknowns))
            .collect::<Result<Vec<_>>>()?;
        EquationSystem::new(doc.unknowns, equations, doc.meta)
    }
}

/// Shape statistics used to order a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemStats {
    pub unknowns: usize,
    pub equations: usize,
    pub max_degree: u32,
    /// For each equation, the position in the unknown order after which all
    /// of its variables are assigned; `None` for constants.
    pub determined_at: Vec<Option<usize>>,
}

pub fn system_stats(s: &EquationSystem) -> SystemStats {
    SystemStats {
        unknowns: s.unknowns.len(),
        equations: s.equations.len(),
        max_degree: s.equations.iter().map(MPoly::total_degree).max().unwrap_or(0),
        determined_at: s.equations.iter().map(|e| e.support_vars().last().copied()).collect(),
    }
}

fn unknown_names(vars: &[String], d: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(vars.len() * d);
    for a in 0..d {
        for v in vars {
            if v.ends_with(|c: char| c.is_ascii_digit()) {
                out.push(format!("{v}_{a}"));
            } else {
                out.push(format!("{v}{a}"));
            }
        }
    }
    out
}

type QPoly = MPoly<BigRational>;

/// Generic elements `X̄_k = Σ_a k_a e_a` with their cached powers.
struct Generic<'a> {
    alg: &'a JetAlgebra,
    unknowns: Vec<String>,
    powers: Vec<Vec<Vec<QPoly>>>,
}

impl<'a> Generic<'a> {
    fn new(alg: &'a JetAlgebra, nvars: usize, unknowns: Vec<String>) -> Self {
        let d = alg.length();
        let one = element_one(alg, &unknowns);
        let powers = (0..nvars)
            .map(|k| {
                let x: Vec<QPoly> =
                    (0..d).map(|a| MPoly::var_in(unknowns.clone(), a * nvars + k)).collect();
                vec![one.clone(), x]
            })
            .collect();
        Generic { alg, unknowns, powers }
    }

    fn power(&mut self, k: usize, e: usize) -> Vec<QPoly> {
        while self.powers[k].len() <= e {
            let last = self.powers[k].last().unwrap();
            let next = mul(self.alg, last, &self.powers[k][1]);
            self.powers[k].push(next);
        }
        self.powers[k][e].clone()
    }

    /// Basis coordinates of `g(X̄_1, ..., X̄_N)`.
    fn substitute(&mut self, g: &MPoly) -> Vec<QPoly> {
        let d = self.alg.length();
        let mut acc = vec![MPoly::zero_in(self.unknowns.clone()); d];
        for (m, c) in g.terms() {
            let mut t = element_one(self.alg, &self.unknowns);
            for (k, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    let p = self.power(k, e as usize);
                    t = mul(self.alg, &t, &p);
                }
            }
            let c = BigRational::from_integer(c.clone());
            for (dst, src) in acc.iter_mut().zip(&t) {
                *dst = &*dst + &src.scale(&c);
            }
        }
        acc
    }
}

fn mul(alg: &JetAlgebra, u: &[QPoly], v: &[QPoly]) -> Vec<QPoly> {
    let mut out: Vec<QPoly> = u.iter().map(|p| MPoly::zero_in(p.vars().to_vec())).collect();
    for (a, ua) in u.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        for (b, vb) in v.iter().enumerate() {
            if vb.is_zero() {
                continue;
            }
            let prod = ua * vb;
            for (c, s) in alg.structure(a, b).iter().enumerate() {
                if !s.is_zero() {
                    out[c] = &out[c] + &prod.scale(s);
                }
            }
        }
    }
    out
}

fn element_one(alg: &JetAlgebra, unknowns: &[String]) -> Vec<QPoly> {
    let mut v = vec![MPoly::zero_in(unknowns.to_vec()); alg.length()];
    v[0] = MPoly::constant_in(unknowns.to_vec(), BigRational::one());
    v
}

/// Multiply through by the lcm of the denominators; the content is kept.
fn clear_denominators(p: &QPoly) -> MPoly {
    let den = p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    p.map_coeffs(|c| (c * BigRational::from_integer(den.clone())).to_integer())
}

fn equations_of(generic: &mut Generic<'_>, generators: &[MPoly]) -> Vec<MPoly> {
    let mut out = Vec::new();
    for g in generators {
        for coeff in generic.substitute(g) {
            if !coeff.is_zero() {
                out.push(clear_denominators(&coeff));
            }
        }
    }
    out
}

/// Morphisms from the fat point of `alg` into the affine scheme cut out by
/// `generators` in the ambient variables `vars`.
pub fn build_nabla_system(
    alg: &JetAlgebra,
    vars: &[String],
    generators: &[MPoly],
) -> Result<EquationSystem> {
    if generators.iter().any(|g| g.vars() != vars) {
        return Err(Error::VariableMismatch);
    }
    let unknowns = unknown_names(vars, alg.length());
    let mut generic = Generic::new(alg, vars.len(), unknowns.clone());
    let equations = equations_of(&mut generic, generators);
    let target = if generators.is_empty() {
        format!("A^{}", vars.len())
    } else {
        let gens: Vec<String> = generators.iter().map(ToString::to_string).collect();
        format!("V({})", gens.join(", "))
    };
    let meta = SystemMeta {
        source: alg.label().to_string(),
        target,
        n: alg.n(),
        length: alg.length(),
        bad_primes: alg.bad_primes().to_vec(),
    };
    EquationSystem::new(unknowns, equations, meta)
}

/// The auto-arc space: endomorphisms of the jet algebra of `f` at level `n`,
/// given by the images of `x` and `y`.
pub fn build_auto_arc_system(f: &MPoly, n: u32) -> Result<EquationSystem> {
    let alg = build_jet_algebra(f, n, BaseField::Rational)?;
    auto_arc_system_for(f, &alg)
}

/// The auto-arc system of `f` over an already built jet algebra of `f`,
/// which may live over `F_p`.
pub fn auto_arc_system_for(f: &MPoly, alg: &JetAlgebra) -> Result<EquationSystem> {
    let n = alg.n();
    let vars = f.vars().to_vec();
    let mut gens = vec![f.clone()];
    for i in (0..=n).rev() {
        gens.push(MPoly::from_terms(vars.clone(), [(vec![i, n - i], BigInt::one())]));
    }
    let mut sys = build_nabla_system(alg, &vars, &gens)?;
    sys.meta.target = alg.label().to_string();
    Ok(sys)
}

/// Coordinates of the identity endomorphism: `X̄ = x`, `Ȳ = y`.
pub fn tautological_point(alg: &JetAlgebra) -> Vec<BigRational> {
    let x = alg.reduce_monomial(1, 0);
    let y = alg.reduce_monomial(0, 1);
    x.into_iter().zip(y).flat_map(|(a, b)| [a, b]).collect()
}

/// Whether a rational point satisfies every equation.
pub fn satisfies(s: &EquationSystem, point: &[BigRational]) -> bool {
    s.equations
        .iter()
        .all(|e| e.eval_with(point, |c| BigRational::from_integer(c.clone())).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::classical_jet_algebra;
    use crate::symbolics::parse_curve;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn affine_target_has_no_equations() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let a = build_jet_algebra(&f, 2, BaseField::Rational).unwrap();
        let s = build_nabla_system(&a, &xy(), &[]).unwrap();
        assert_eq!(s.unknowns().len(), 6);
        assert!(s.equations().is_empty());
        assert_eq!(s.meta().target, "A^2");
    }

    #[test]
    fn cusp_target_at_level_two() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let a = build_jet_algebra(&f, 2, BaseField::Rational).unwrap();
        let s = build_nabla_system(&a, &xy(), &[f]).unwrap();
        assert_eq!(s.unknowns(), ["x0", "y0", "x1", "y1", "x2", "y2"]);
        let eqs: Vec<String> = s.equations().iter().map(ToString::to_string).collect();
        assert_eq!(
            eqs,
            [
                "y0^2 - x0^3",
                "2*y0*y1 - 3*x0^2*x1",
                "2*y0*y2 - 3*x0^2*x2",
            ]
        );
    }

    #[test]
    fn classical_one_jets_of_the_cusp() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let l2 = classical_jet_algebra(2);
        let s = build_nabla_system(&l2, &xy(), &[f]).unwrap();
        let eqs: Vec<String> = s.equations().iter().map(ToString::to_string).collect();
        assert_eq!(eqs, ["y0^2 - x0^3", "2*y0*y1 - 3*x0^2*x1"]);
    }

    #[test]
    fn auto_system_shapes() {
        let f = parse_curve("y^2 - x^3").unwrap();
        let s1 = build_auto_arc_system(&f, 1).unwrap();
        let eqs: Vec<String> = s1.equations().iter().map(ToString::to_string).collect();
        assert_eq!(eqs, ["y0^2 - x0^3", "x0", "y0"]);
        let s2 = build_auto_arc_system(&f, 2).unwrap();
        let st = system_stats(&s2);
        assert_eq!((st.unknowns, st.equations, st.max_degree), (6, 12, 3));
        assert_eq!(build_auto_arc_system(&f, 3).unwrap().unknowns().len(), 10);
    }

    #[test]
    fn identity_is_a_point() {
        for text in ["y^2 - x^3", "x*y", "y - x^2", "y^2 - x^2 - x^3", "3*y - x^2"] {
            let f = parse_curve(text).unwrap();
            for n in 1..=5 {
                let a = build_jet_algebra(&f, n, BaseField::Rational).unwrap();
                let s = auto_arc_system_for(&f, &a).unwrap();
                assert!(satisfies(&s, &tautological_point(&a)), "{text} at n = {n}");
            }
        }
    }

    #[test]
    fn empty_stats() {
        let meta = SystemMeta {
            source: String::new(),
            target: String::new(),
            n: 0,
            length: 0,
            bad_primes: vec![],
        };
        let s = EquationSystem::new(vec![], vec![], meta).unwrap();
        assert_eq!(
            system_stats(&s),
            SystemStats { unknowns: 0, equations: 0, max_degree: 0, determined_at: vec![] }
        );
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = parse_curve("y^2 - x^2 - x^3").unwrap();
        let s = build_auto_arc_system(&f, 3).unwrap();
        let text = s.to_json();
        let back = EquationSystem::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }
}
