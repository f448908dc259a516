//! Exact computation of transferred A∞ structures for Lie pairs over a point.

pub mod app;
pub mod ce;
pub mod compare;
pub mod enveloping;
pub mod error;
pub mod exterior;
pub mod graded;
pub mod hpl;
pub mod lie_pair;
pub mod scalar;
pub mod sections;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::Scalar;
