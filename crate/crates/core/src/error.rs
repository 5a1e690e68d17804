use num_complex::Complex64;
use thiserror::Error;

use crate::parse::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("polynomial has degree 0 in {0}; a plane curve needs at least one sheet")]
    NotACover(String),

    #[error("leading coefficient in y vanishes at x = {0}")]
    DegenerateLeading(Complex64),

    #[error("x = {x} is too near a branch point (root separation {separation:e})")]
    NearBranchPoint { x: Complex64, separation: f64 },

    #[error("analytic continuation failed near x = {0}")]
    ContinuationFailed(Complex64),

    #[error("y = {y} is not a fiber value over x = {x} (residual {residual:e})")]
    NotInFiber { x: Complex64, y: Complex64, residual: f64 },

    #[error("discriminant vanishes identically; the polynomial is not squarefree in y")]
    NotSquarefree,

    #[error("standoff circle around branch point {0} could not be made disjoint from other branch points")]
    StandoffExhausted(Complex64),

    #[error("path from base point to {0} passes through another branch point")]
    BaseRayBlocked(Complex64),

    #[error("sheet labeling has {got} entries, curve has {expected} sheets")]
    Labeling { expected: usize, got: usize },

    #[error("sheet index {0} out of range")]
    SheetIndex(usize),

    #[error("invalid cycle {name:?}: {reason}")]
    InvalidCycle { name: String, reason: String },

    #[error("intersection degeneracy could not be resolved by perturbation: {0}")]
    UnresolvableDegeneracy(String),

    #[error("basis is not canonical: intersection matrix differs from J")]
    NotCanonical,

    #[error("matrix is not symplectic: {0}")]
    NotSymplectic(String),

    #[error("cannot identify the sheet of image point x = {0}")]
    SheetAmbiguity(Complex64),

    #[error("image of the path leaves the representable region near x = {0}")]
    ImageOutOfRange(Complex64),

    #[error("matrix is singular or ill-conditioned (condition estimate {0:e})")]
    Singular(f64),

    #[error("quadrature did not converge on edge {edge} (error estimate {estimate:e})")]
    Quadrature { edge: usize, estimate: f64 },

    #[error("integrand is singular near x = {0}")]
    SingularIntegrand(Complex64),

    #[error("constraint residual {residual:e} exceeds tolerance {tol:e}")]
    ConstraintResidual { residual: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-integer value {0} in exact homology arithmetic")]
    NonInteger(f64),

    #[error("{0}")]
    Input(String),
}
