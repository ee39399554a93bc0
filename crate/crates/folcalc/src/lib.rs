//! Exact-arithmetic calculator for the basic cohomology of suspension
//! foliations over tori.
//!
//! A unimodular integer matrix acting on the n-torus defines a suspension
//! foliation whose basic complex splits over the finite orbits of the
//! transposed action on Fourier modes. This crate computes, per orbit and
//! aggregated over growing mode boxes, the exact dimensions of seven
//! cohomology theories (de Rham, Dolbeault, Bott-Chern, Aeppli, and the
//! three built from the degree-lowering symplectic differential), and
//! classifies each graded piece as stabilized or growing across
//! truncations. All arithmetic is over Gaussian rationals; every reported
//! number is exact.

pub mod cohomology;
pub mod config;
pub mod dense;
pub mod error;
pub mod fibers;
pub mod frame;
pub mod lattice;
pub mod linalg;
pub mod output;
pub mod report;
pub mod run;
pub mod scalar;
pub mod structures;

pub use error::{Error, Result};
