//! Command-line companion for `cvfid-core`: state files, scans,
//! counterexample search, and the brute-force Fock verification backend.

pub mod cli;
pub mod error;
pub mod fock;
pub mod presets;
pub mod scan;
pub mod states;

pub use error::{CliError, Result};
