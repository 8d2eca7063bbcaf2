//! Command-line front end for the CTC circuit simulator: built-in scenarios,
//! the solve/enumerate/check commands, and their exit-code contract.

pub mod commands;
pub mod scenarios;

pub use commands::{EXIT_INPUT, EXIT_OK, EXIT_PROPERTY, EXIT_SOLVER};
