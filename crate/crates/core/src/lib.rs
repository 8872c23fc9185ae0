pub mod error;
pub mod cli;
pub mod flow;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
