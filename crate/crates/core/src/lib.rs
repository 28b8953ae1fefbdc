//! Zeros of partial sums of power series and the curves they accumulate on.

pub mod analysis;
pub mod apnum;
pub mod cli;
pub mod curves;
pub mod error;
pub mod roots;
pub mod series;

pub use apnum::{APComplex, PrecisionPolicy};
pub use error::{Error, Result};
