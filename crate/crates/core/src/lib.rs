//! Monodromy, homology intersection numbers, symplectic transforms and
//! Riemann period matrices of plane algebraic curves, with Klein's quartic
//! as a fully worked example.

pub mod algcurve;
pub mod cjson;
pub mod cyclefile;
pub mod error;
pub mod homology;
pub mod klein;
pub mod linalg;
pub mod parse;
pub mod periods;
pub mod perm;
pub mod poly;
pub mod quadrature;
pub mod roots;

pub use algcurve::PlaneCurve;
pub use cyclefile::CycleFile;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use parse::{parse_polynomial, Constants};
pub use perm::Permutation;
pub use poly::BivariatePolynomial;
