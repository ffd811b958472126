//! Free probability toolkit: truncated power series, non-crossing partitions,
//! free cumulants, transforms, free Poisson and free binomial laws, and the
//! regression characterizations built on them.

pub mod characterize;
pub mod error;
pub mod freemoments;
pub mod laws;
pub mod ncpart;
pub mod quadrature;
pub mod series;
pub mod transforms;

pub use error::{Error, Result};
pub use series::{Rational, Scalar, Series};
