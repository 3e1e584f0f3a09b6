//! Argument parsing and dispatch, kept in the library so the whole command
//! surface can be driven in-process.

use crate::certify::CertifyOptions;
use crate::commands::{self, SearchArgs, FULL_SCALE_BITS, FULL_SCALE_K_MAX};
use crate::diag::{apply_env, CliError, CliResult, EXIT_DOMAIN, EXIT_OK};
use crate::numarg::parse_biguint;
use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "kbm",
    version,
    about = "Certified k-bonacci intersection tools"
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Exact term F_n^(k).
    #[command(allow_negative_numbers = true)]
    Term { k: u32, n: i64 },
    /// Certified enclosure of the dominant root.
    Root {
        k: u32,
        #[arg(long, default_value_t = 128)]
        bits: u32,
    },
    /// Bound chains for a fixed k, or the m-bound for a fixed ell.
    Bounds {
        #[arg(required_unless_present = "ell", conflicts_with = "ell")]
        k: Option<u64>,
        #[arg(long)]
        ell: Option<u64>,
    },
    /// Continued-fraction reduction certificate for k.
    Reduce {
        k: u32,
        /// Cap on m; defaults to the closed-form M_k.
        #[arg(long = "M", value_parser = parse_biguint)]
        m: Option<BigUint>,
    },
    /// k-way merge intersection search.
    Search {
        #[arg(long, default_value_t = 2)]
        kmin: u32,
        #[arg(long, required_unless_present = "full_scale")]
        kmax: Option<u32>,
        /// Values up to 2^bits are explored.
        #[arg(long = "bits-bound", required_unless_present = "full_scale")]
        bits_bound: Option<u64>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        checkpoint_every: u64,
        /// Allow runs beyond desk scale.
        #[arg(long)]
        long_run: bool,
        /// k < 5000 and terms below 2^5000; needs --long-run.
        #[arg(long)]
        full_scale: bool,
    },
    /// Whole pipeline: reductions, combined bounds, replay search.
    Certify {
        #[arg(long, required_unless_present = "full_scale")]
        kmax: Option<u32>,
        #[arg(long, default_value_t = 64)]
        search_bits: u64,
        /// Per-k reduction cap, `full` for M_k.
        #[arg(long, default_value = "1e60")]
        m_cap: String,
        #[arg(long)]
        long_run: bool,
        /// k < 5000, search to 2^5000 and full caps; needs --long-run.
        #[arg(long)]
        full_scale: bool,
    },
}

fn run(cmd: Cmd, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Cmd::Term { k, n } => commands::term(k, n, out),
        Cmd::Root { k, bits } => commands::root(k, bits, out),
        Cmd::Bounds { k: Some(k), .. } => commands::bounds_k(k, out),
        Cmd::Bounds { ell, .. } => commands::bounds_ell(ell.expect("clap enforces"), out),
        Cmd::Reduce { k, m } => commands::reduce(k, m, out),
        Cmd::Search {
            kmin,
            kmax,
            bits_bound,
            checkpoint,
            checkpoint_every,
            long_run,
            full_scale,
        } => {
            let args = if full_scale {
                full_scale_gate(long_run)?;
                SearchArgs {
                    k_min: 2,
                    k_max: FULL_SCALE_K_MAX,
                    bits: FULL_SCALE_BITS,
                    checkpoint,
                    checkpoint_every,
                    long_run,
                }
            } else {
                SearchArgs {
                    k_min: kmin,
                    k_max: kmax.expect("clap enforces"),
                    bits: bits_bound.expect("clap enforces"),
                    checkpoint,
                    checkpoint_every,
                    long_run,
                }
            };
            commands::search(&args, out)
        }
        Cmd::Certify {
            kmax,
            search_bits,
            m_cap,
            long_run,
            full_scale,
        } => {
            let opts = if full_scale {
                full_scale_gate(long_run)?;
                CertifyOptions {
                    k_max: FULL_SCALE_K_MAX,
                    search_bits: FULL_SCALE_BITS,
                    m_cap: None,
                }
            } else {
                let m_cap = match m_cap.as_str() {
                    "full" => None,
                    s => Some(parse_biguint(s).map_err(CliError::Usage)?),
                };
                CertifyOptions {
                    k_max: kmax.expect("clap enforces"),
                    search_bits,
                    m_cap,
                }
            };
            commands::run_certify(&opts, long_run, out)
        }
    }
}

fn full_scale_gate(long_run: bool) -> CliResult<()> {
    if long_run {
        Ok(())
    } else {
        Err(CliError::Usage(
            "--full-scale is a long run; pass --long-run as well".into(),
        ))
    }
}

fn fail(e: &CliError, err: &mut dyn Write) -> i32 {
    if let CliError::Io(io) = e {
        if io.kind() == std::io::ErrorKind::BrokenPipe {
            return EXIT_OK;
        }
    }
    let _ = writeln!(err, "{}", e.to_json());
    e.exit_code()
}

/// Runs one invocation and returns the exit code. `env` supplies the
/// `KBM_*` variables.
pub fn main_with<I, T>(
    argv: I,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            let diag = CliError::Usage(msg.lines().next().unwrap_or("bad arguments").to_string());
            let _ = writeln!(err, "{}", diag.to_json());
            return EXIT_DOMAIN;
        }
    };
    if let Err(e) = apply_env(env) {
        return fail(&e, err);
    }
    match run(cli.cmd, out) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(&e, err),
    }
}

#[cfg(test)]
#[path = "app_tests.rs"]
mod tests;
