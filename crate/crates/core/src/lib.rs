//! Floquet spectra of second-order operators with periodic, asymptotically
//! constant coefficients.

pub mod applications;
#[cfg(feature = "cli")]
pub mod cli;
pub mod degree;
pub mod dispersion;
pub mod error;
pub mod linalg;
pub mod model;
pub mod monodromy;
pub mod ode;
mod par;
pub mod perturbation;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
