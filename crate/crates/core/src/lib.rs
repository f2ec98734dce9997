//! Arbitrary-precision engine for level-1 Ramanujan-type series for 1/π.
//!
//! The crate evaluates complete elliptic integrals and singular moduli,
//! maps a singular value `r` to series parameters `(z, a, b)`, sums the
//! resulting series (with an exact binary-splitting path for the rational
//! Chudnovsky data), recognizes algebraic constants by lattice reduction,
//! and certifies the `r = 163` and `r = 243` series numerically.

pub mod algebra;
pub mod elliptic;
pub mod error;
pub mod numtheory;
pub mod params;
pub mod precision;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use precision::{BigInt, BigRational, PrecComplex, PrecReal, PrecisionContext};
