//! High-precision special values of symmetrized shifted convolution series
//! for level-1 cusp forms.
//!
//! The crate computes the values three independent ways — accelerated direct
//! summation, the coefficients of a mock-modular generating function built
//! from Kloosterman/Bessel sums, and a regularized holomorphic projection —
//! and carries the classical layer they rest on: exact q-expansions, period
//! integrals and critical L-values, additive twists, and period polynomials.

pub mod complex;
pub mod error;
pub mod extrapolate;
pub mod maass;
pub mod modular;
pub mod periods;
pub mod precision;
pub mod qseries;
pub mod quad;
pub mod shifted;
pub mod special;

pub use complex::BigComplex;
pub use error::{Error, Result};
pub use precision::PrecisionContext;
