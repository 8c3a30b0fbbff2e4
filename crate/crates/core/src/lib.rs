//! Numerical toolkit for unitarily invariant reproducing kernel Hilbert
//! spaces on the unit ball of ℂ^d.
//!
//! The crate computes kernel coefficient sequences and their formal
//! inverses, certifies the complete Nevanlinna-Pick property, solves
//! Pick-matrix feasibility problems, builds finite-dimensional model
//! operator tuples (compressed shifts modulo homogeneous ideals),
//! evaluates the hereditary calculus 1/k(T,T*), and constructs and
//! verifies Agler-type coextension isometries.

pub mod dilation;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod pick;
pub mod poly;
pub mod sampling;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub use kernel::{CnpVerdict, CoeffTable, KernelFamily, KernelSpec};
pub use model::OperatorTuple;
pub use pick::{PickProblem, PsdVerdict};
pub use poly::{HomogeneousIdeal, MonomialBasis, MultiIndex};

/// Formats a float with 17 significant digits so that reports round-trip
/// bit-faithfully.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}
