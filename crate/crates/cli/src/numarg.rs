use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Parses a non-negative integer written as decimal digits, `a e b`
/// (`a * 10^b`) or `a ^ b`. Underscores are ignored.
pub fn parse_biguint(s: &str) -> Result<BigUint, String> {
    let t: String = s.trim().chars().filter(|c| *c != '_').collect();
    let bad = || format!("not a non-negative integer: {s:?}");
    let digits = |x: &str| -> Result<BigUint, String> {
        if x.is_empty() || !x.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigUint::parse_bytes(x.as_bytes(), 10).ok_or_else(bad)
    };
    let exponent = |x: &str| -> Result<u32, String> {
        let e = digits(x)?;
        u32::try_from(e)
            .ok()
            .filter(|e| *e <= 100_000)
            .ok_or_else(bad)
    };
    if let Some((a, b)) = t.split_once(['e', 'E']) {
        return Ok(digits(a)? * BigUint::from(10u32).pow(exponent(b)?));
    }
    if let Some((a, b)) = t.split_once('^') {
        let base = digits(a)?;
        let e = exponent(b)?;
        if base.is_zero() && e == 0 {
            return Ok(BigUint::one());
        }
        return Ok(base.pow(e));
    }
    digits(&t)
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    u64::try_from(parse_biguint(s)?).map_err(|_| format!("out of range: {s:?}"))
}
