pub mod dense;
pub mod error;
pub mod ghz;
pub mod keyrate;
pub mod network;
pub mod noise;
pub mod protocol;
pub mod toeplitz;

pub use error::{Error, Result};
