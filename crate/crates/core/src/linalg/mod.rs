//! Exact rational linear algebra: sparse matrices, reduced echelon forms,
//! kernels and coordinate solving.

mod rational;
mod sparse;

pub use rational::{ParseRationalError, Rational};
pub use sparse::{
    coordinates_in_span, kernel_basis, rank, reduced_echelon, BasisTag, Echelon, LinearMap, SpanSolver, SparseVec,
};
