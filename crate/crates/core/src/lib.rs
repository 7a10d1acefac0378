pub mod archimedean;
pub mod averages;
pub mod arith;
pub mod coeffs;
pub mod cutoff;
pub mod dirichlet;
pub mod error;
pub mod lvalue;
pub mod quadclass;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
