pub mod arith;
pub mod cli;
pub mod constructions;
pub mod diagram;
pub mod dynamics;
pub mod error;
pub mod measure;
pub mod spectral;
pub mod transform;

pub use error::{Error, Result};
