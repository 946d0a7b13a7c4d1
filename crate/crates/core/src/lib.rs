//! Exact series engine, kernel computations and verification suites for
//! quantum current algebras attached to curves.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod hmatrix;
pub mod hseries;
pub mod level0;
pub mod rational;
pub mod scalar;
pub mod suite;
pub mod theta;
pub mod zn;

pub use error::{QcError, QcResult};
pub use hseries::{RegionSeries, Series};
pub use scalar::{Cyclotomic, GaussRat, Scalar};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
