//! Exact gauges on cumulative distribution functions and quantitative
//! compactness indices for families of them.
//!
//! * [`cdf`]: piecewise CDFs with rational coordinates.
//! * [`distances`]: uniform distance, `phi`, `psi`, Lévy metrics, `delta`.
//! * [`family`]: finitely presented families and sequences of CDFs.
//! * [`indices`]: escape index, limit operator, Helly selection and the
//!   two-sided compactness bracket.
//! * [`approach`]: a small kernel for spaces given by countable local gauge
//!   bases, with finite spaces and the CDF space as instances.

// Error payloads carry exact rationals for their messages.
#![allow(clippy::result_large_err)]
pub mod approach;
pub mod cdf;
pub mod distances;
pub mod error;
pub mod family;
pub mod indices;
pub mod rational;
pub mod sample;

pub use cdf::{Cdf, Jump, Segment, SupportBound};
pub use error::{Error, Result};
pub use rational::Rational;
