pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod hermite;
pub mod kernel;
pub mod littlewood_paley;
pub mod quadrature;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
