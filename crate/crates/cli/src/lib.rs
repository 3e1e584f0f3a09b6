//! Command implementations behind the `kbm` binary. Every command writes
//! JSON lines; failures become a structured diagnostic and an exit code.

pub mod app;
pub mod certify;
pub mod commands;
pub mod diag;
pub mod numarg;

pub use certify::{certify, CertifyOptions, CertifyReport};
pub use diag::{CliError, CliResult};
