//! Working-precision ladder shared by all certified predicates.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_CAP_BITS: u32 = 1 << 20;

static PRECISION_CAP: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_CAP_BITS);

/// Process-wide cap on the ladder (bits).
pub fn precision_cap() -> u32 {
    PRECISION_CAP.load(Ordering::Relaxed)
}

pub fn set_precision_cap(bits: u32) {
    PRECISION_CAP.store(bits.max(64), Ordering::Relaxed);
}

/// Runs `f` at `start` bits, doubling on retryable failures until the cap.
pub fn ladder<T>(start: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let cap = precision_cap();
    let mut bits = start.clamp(64, cap.max(64));
    loop {
        match f(bits) {
            Err(e) if e.is_retryable() => {
                if bits >= cap {
                    return Err(Error::PrecisionExhausted {
                        what: e.to_string(),
                        bits,
                    });
                }
                bits = bits.saturating_mul(2).min(cap);
            }
            other => return other,
        }
    }
}

/// Turns an unresolved comparison into a retryable error.
pub fn certify(v: Option<bool>, what: &str, bits: u32) -> Result<bool> {
    v.ok_or_else(|| Error::indeterminate(what, bits))
}
