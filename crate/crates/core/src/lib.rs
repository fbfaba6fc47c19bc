pub mod assembly;
pub mod dense;
pub mod error;
pub mod multigrid;
pub mod quadrature;
pub mod spectral;
pub mod structured;

pub use error::{Error, Result};
