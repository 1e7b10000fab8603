pub mod error;
pub mod linalg;
pub mod mme;
pub mod rational;
pub mod solenoid;
pub mod cover;
pub mod classify;
pub mod cli;
pub mod conjugacy;
pub mod shadowing;

pub use error::{Error, Result};
