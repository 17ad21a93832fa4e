//! Pseudo-spectral simulation of a simplified Ericksen-Leslie nematic liquid
//! crystal model on a large periodic box, with diagnostics for its energy
//! inequalities, pointwise bounds and algebraic decay laws.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod lcd;
pub mod spectral;

pub use error::{Error, Result};
