//! Small dense numerics: vectors, symmetric eigenproblems, finite differences.

pub mod diff;
pub mod linalg;
pub mod vector;

pub use diff::{
    central_diff_gradient, central_diff_jet, five_point_derivative, Jet1, Jet2, DEFAULT_STEP, FIRST_DERIVATIVE_OFFSETS,
};
pub use linalg::{
    gram_schmidt, gram_schmidt_with_coeffs, orthogonal_complement, symmetric_eigen, Eigen, Matrix, SymMatrix,
};
pub use vector::{Complex, CplxVec, Linear, RealVec};
