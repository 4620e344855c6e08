//! Exact computations with skeletons of Cartan geometries: validation, kernels,
//! extensions, curvature, automorphism algebras, and the Riemannian metric
//! classification pipeline.

pub mod autos;
pub mod error;
pub mod exactmat;
pub mod extension;
pub mod liealg;
pub mod riemann;
pub mod skeleton;

pub use error::{Error, Result};
pub use exactmat::{kernel, rat, ratio, rref, solve, Basis, Mat, Rational, Subspace};
pub use liealg::{builtin, LieAlgebra, LinearMap, MatrixRealization};
