use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular (pivot {pivot:e} below tolerance {tol:e})")]
    SingularMatrix { pivot: f64, tol: f64 },
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("evaluation point {0} hits a pole")]
    PoleHit(String),
    #[error("spectrum is degenerate: {0}")]
    DegenerateSpectrum(String),
    #[error("matrix is not self-adjoint (deviation {0:e})")]
    NotSelfAdjoint(f64),
    #[error("perturbation directions are degenerate: {0}")]
    DegenerateDirections(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("spectrum is not real: {0}")]
    ComplexSpectrum(String),
    #[error("no Jordan chain of length two at {0}")]
    NoJordanChain(String),
    #[error("extrapolation estimates disagree: {0}")]
    InconsistentExtrapolation(String),
    #[error("B*v is a scalar multiple of u; the rank-one Hermitian theory applies instead")]
    ScalarMultipleCase,
    #[error("B is singular or not square: {0}")]
    SingularB(String),
    #[error("point outside the supported region: {0}")]
    UnsupportedRegion(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("transform denominator vanishes at {0}")]
    DenominatorVanishes(String),
    #[error("density extrapolation did not settle at {0} grid points")]
    NonConvergentExtrapolation(usize),
    #[error("density denominator f vanishes inside the support at x = {0}")]
    DensityPole(f64),
    #[error("range undefined: {0}")]
    UndefinedRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
