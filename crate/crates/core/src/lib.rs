pub mod cli;
pub mod conditional;
pub mod error;
pub mod fock;
pub mod oracles;
pub mod phase_space;
pub mod povm;
pub mod quadrature;
pub mod special;
pub mod teleport;

pub use error::{Error, Result};
