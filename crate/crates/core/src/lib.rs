//! Local and global solvability of `aU² + bV² + cW² = dZ²`, `UW = V²`.

pub mod cli;
pub mod conics;
pub mod error;
pub mod global;
pub mod lifting;
pub mod local;
pub mod modarith;
pub mod padic;
pub mod primes;
pub mod quartic;
pub mod system;

pub use error::{Error, Result};
