pub mod cli;
pub mod dynamics;
pub mod error;
pub mod jet;
pub mod hamiltonian;
pub mod lagrangian;
pub mod legendre;
pub mod scenario;
pub mod symbolic;
pub mod symmetry;

pub use error::{Error, Result};
