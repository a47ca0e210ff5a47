//! Library half of the `weil` command: argument types, output records, the
//! result cache, and the subcommand drivers.

pub mod args;
pub mod cache;
pub mod commands;
pub mod error;
pub mod record;

pub use commands::run;
pub use error::{CliError, Result};
