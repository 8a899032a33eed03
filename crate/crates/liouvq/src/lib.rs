//! File formats, parallel scans and the command-line front end for
//! [`liouvq_core`].
//!
//! The `liouvq` binary is a thin wrapper around [`run::run`]; everything it
//! does is reachable from here as well.

pub mod formats;
pub mod run;
pub mod scan;

pub use run::{run, CliError, Command, Format, RunConfig};
