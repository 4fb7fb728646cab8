//! Exact computer algebra for the gravity operad.
//!
//! The cohomology of configuration spaces of points in the plane is modeled by
//! the Arnold algebra ([`arnold`]); the circle action gives the contraction
//! `Δ*` ([`circle`]). The gravity operad is built twice, once as a suboperad of
//! the suspended homology of the framed little disks ([`westerland`]) and once
//! from residues on `M_{0,n+1}` ([`gk`]), and the two are compared.

pub mod arnold;
pub mod circle;
pub mod combinatorics;
pub mod error;
pub mod expr;
pub mod gk;
pub mod linalg;
pub mod operad;
pub mod westerland;

pub use error::{Error, Result};
