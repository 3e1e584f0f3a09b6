use crate::certify::{certify, CertifyOptions, DESK_MAX_BITS, DESK_MAX_K};
use crate::diag::{CliError, CliResult};
use kbm::algnum::dominant_root;
use kbm::linforms::{
    bound_M_of_k, bound_ell_of_k, bound_m_of_ell, cap_m_of_k, check_large_k_premise,
    check_log_m_absorption, check_m_cap_domination, large_k_contradiction, replay_ell_chain,
    replay_m_chain,
};
use kbm::meet::SearchConfig;
use kbm::redux::reduce_for_k;
use kbm::{kbonacci, BoundChainReport, Error, SearchState};
use num_bigint::BigUint;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Full-scale region: k < 5000 and terms below 2^5000.
pub const FULL_SCALE_K_MAX: u32 = 4999;
pub const FULL_SCALE_BITS: u64 = 5000;

fn emit(out: &mut dyn Write, v: &Value) -> CliResult<()> {
    writeln!(out, "{v}")?;
    out.flush()?;
    Ok(())
}

fn emit_raw(out: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(out, "{line}")?;
    out.flush()?;
    Ok(())
}

pub fn term(k: u32, n: i64, out: &mut dyn Write) -> CliResult<()> {
    let v = kbonacci(k, n)?;
    emit(out, &json!({"value": v.to_string()}))
}

pub fn root(k: u32, bits: u32, out: &mut dyn Write) -> CliResult<()> {
    let r = dominant_root(k, bits)?;
    emit(
        out,
        &json!({"k": k, "root": r.value.to_doc(), "approx": r.value.to_f64()}),
    )
}

fn chain_json(r: kbm::Result<BoundChainReport>) -> CliResult<Value> {
    match r {
        Ok(rep) => Ok(serde_json::to_value(rep).expect("report serializes")),
        Err(Error::ChainViolation { step, input }) => {
            Ok(json!({"violation": {"step": step, "input": input}}))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn bounds_k(k: u64, out: &mut dyn Write) -> CliResult<()> {
    if k < 2 {
        return Err(Error::Domain("k must be at least 2".into()).into());
    }
    let v = json!({
        "k": k,
        "M_k": cap_m_of_k(k)?.to_string(),
        "bound_M_of_k": bound_M_of_k(k)?,
        "bound_ell_of_k": bound_ell_of_k(k)?,
        "ell_chain": chain_json(replay_ell_chain(k))?,
        "m_cap_dominates_chain": check_m_cap_domination(k)?,
        "large_k_premise": check_large_k_premise(k)?,
        "large_k": large_k_contradiction(k)?,
    });
    emit(out, &v)
}

pub fn bounds_ell(ell: u64, out: &mut dyn Write) -> CliResult<()> {
    if ell < 3 {
        return Err(Error::Domain("ell must be at least 3".into()).into());
    }
    let v = json!({
        "ell": ell,
        "bound_m_of_ell": bound_m_of_ell(ell)?,
        "m_chain": chain_json(replay_m_chain(ell))?,
        "log_m_absorption": check_log_m_absorption(ell)?,
    });
    emit(out, &v)
}

pub fn reduce(k: u32, m: Option<BigUint>, out: &mut dyn Write) -> CliResult<()> {
    let m = match m {
        Some(m) => m,
        None => cap_m_of_k(k as u64)?,
    };
    let cert = reduce_for_k(k, &m)?;
    cert.verify()?;
    emit_raw(out, &cert.to_json())
}

#[derive(Debug, Clone)]
pub struct SearchArgs {
    pub k_min: u32,
    pub k_max: u32,
    pub bits: u64,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: u64,
    pub long_run: bool,
}

pub fn gate(k_max: u32, bits: u64, long_run: bool) -> CliResult<()> {
    if !long_run && (k_max > DESK_MAX_K || bits > DESK_MAX_BITS) {
        return Err(CliError::Usage(format!(
            "k_max {k_max} / {bits} bits is beyond desk scale (k <= {DESK_MAX_K}, \
             bits <= {DESK_MAX_BITS}); pass --long-run to allow it"
        )));
    }
    Ok(())
}

fn write_atomic(path: &Path, blob: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, blob)?;
    std::fs::rename(&tmp, path)
}

/// Streams hits as JSON lines. With a checkpoint path, an existing file is
/// resumed (its earlier hits are re-emitted first) and the file is rewritten
/// every `checkpoint_every` pops and once at the end.
pub fn search(args: &SearchArgs, out: &mut dyn Write) -> CliResult<()> {
    gate(args.k_max, args.bits, args.long_run)?;
    let mut cfg = SearchConfig::with_bits(args.k_min, args.k_max, args.bits)?;
    let path = args.checkpoint.as_deref();
    cfg.checkpoint_every = if path.is_some() {
        args.checkpoint_every
    } else {
        0
    };
    let mut state = match path {
        Some(p) if p.exists() => {
            let s = SearchState::load(&std::fs::read(p)?)?;
            let c = s.config();
            if (c.k_min, c.k_max, &c.value_bound) != (cfg.k_min, cfg.k_max, &cfg.value_bound) {
                return Err(CliError::Usage(format!(
                    "checkpoint {} was written for a different search",
                    p.display()
                )));
            }
            for h in s.hits() {
                emit_raw(out, &h.to_json_line())?;
            }
            s
        }
        _ => SearchState::new(cfg)?,
    };
    let mut io_err = None;
    state.run(
        |h| {
            if io_err.is_none() {
                if let Err(e) = emit_raw(out, &h.to_json_line()) {
                    io_err = Some(e);
                }
            }
        },
        |blob| match path {
            Some(p) => {
                write_atomic(p, blob).map_err(|e| Error::Domain(format!("checkpoint write: {e}")))
            }
            None => Ok(()),
        },
    )?;
    if let Some(e) = io_err {
        return Err(e);
    }
    if let Some(p) = path {
        write_atomic(p, &state.save())?;
    }
    Ok(())
}

pub fn run_certify(opts: &CertifyOptions, long_run: bool, out: &mut dyn Write) -> CliResult<()> {
    gate(opts.k_max, opts.search_bits, long_run)?;
    let report = certify(opts)?;
    emit_raw(out, &report.to_json())
}
