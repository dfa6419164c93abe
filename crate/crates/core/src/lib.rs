pub mod bae;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod coords;
pub mod derivation;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod poly;
pub mod potential;
pub mod prepot;
pub mod verify;

pub use error::{Error, Result};
