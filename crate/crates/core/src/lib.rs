pub mod error;
pub mod harness;
pub mod landscape;
pub mod optimizers;
pub mod oracles;
pub mod seed;

pub use error::{Error, Result};
