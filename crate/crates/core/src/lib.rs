pub mod bounds;
pub mod cli;
pub mod congruence;
pub mod emit;
pub mod error;
pub mod expsum;
pub mod modmath;
pub mod numtheory;
pub mod reports;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
