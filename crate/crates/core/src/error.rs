use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at offset {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("variable lists differ")]
    VariableMismatch,
    #[error("cannot substitute L = 0 into a class with negative powers of L")]
    ZeroSubstitution,
    #[error("not polynomial-count at this bound: no polynomial of degree <= {bound} fits the samples")]
    NotPolynomialCount { bound: usize },
    #[error("denominator has zero constant term, no power series expansion exists")]
    NotExpandable,
    #[error("coefficient of t^{index} is not a Laurent polynomial in L with integer coefficients")]
    NotLaurent { index: usize },
    #[error("no rational function with numerator degree {num_deg} and denominator degree {den_deg} reproduces the series")]
    NoFit { num_deg: usize, den_deg: usize },
    #[error("need at least {needed} coefficients, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error("point is not on the curve (value {value}); translate first")]
    NotOnCurve { value: String },
    #[error("the zero polynomial does not define a curve")]
    ZeroPolynomial,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no linear tail of the Hilbert-Samuel function within n <= {nmax}")]
    NoLinearTail { nmax: u32 },
    #[error("node budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("point count overflowed 128 bits")]
    CountOverflow,
    #[error("extension required: branch coefficient is a root of {poly}")]
    ExtensionRequired { poly: String },
    #[error("curve equation is not squarefree")]
    NotSquarefree,
    #[error("germ has {0} branches, expected exactly one")]
    Multibranched(usize),
    #[error("truncation bound {bound} too small to certify the conductor")]
    BoundTooSmall { bound: u32 },
    #[error("inconclusive: coefficient of t^{index} is not certain")]
    Inconclusive { index: usize },
    #[error("Puiseux iteration did not separate the branches within {0} steps")]
    PuiseuxDiverged(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
