pub mod baselines;
pub mod error;
pub mod matrix;
pub mod problems;
pub mod solver;
pub mod prox;
pub mod svd;
pub mod verify;

pub use error::{Error, Result};
