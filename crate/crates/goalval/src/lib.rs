//! Command-line front end for `goalval-core`: function and instance input,
//! a shared result cache, and the `goalval` subcommands.

pub mod cache;
pub mod cli;
pub mod error;
pub mod input;

pub use error::{CliError, Result};
