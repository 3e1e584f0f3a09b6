//! Logarithm and exponential on balls, with explicit series tail bounds.

use std::cell::RefCell;
use std::collections::HashMap;

use super::{Ball, Dyadic};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 32;

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, Ball>> = RefCell::new(HashMap::new());
}

/// `sum_{j>=0} z^(2j+1) / (2j+1)` for `|z| < 1/2`, tail included in the radius.
fn atanh_series(z: &Ball, work: u32) -> Ball {
    let zu = z.abs_upper();
    if zu.is_zero() {
        return Ball::zero(work);
    }
    // zu < 2^-c
    let c = -(zu.ilog2() + 1);
    assert!(c >= 1, "atanh series argument too large");
    let terms = (work as i64 + 4) / (2 * c) + 1;
    let z2 = z.sqr();
    let mut power = z.with_prec(work);
    let mut sum = power.clone();
    for j in 1..terms {
        power = &power * &z2;
        let term = power
            .div(&Ball::from_int(2 * j + 1, work))
            .expect("odd integer divisor");
        sum = &sum + &term;
    }
    // Remaining terms: <= zu^(2N+1) / (1 - zu^2) <= 2^(-c(2N+1)) * 4/3.
    sum.add_error(&Dyadic::pow2(-c * (2 * terms + 1) + 1))
}

/// `ln 2`, enclosed at `prec` bits.
pub fn ln2(prec: u32) -> Ball {
    if let Some(hit) = LN2_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
        return hit;
    }
    let work = prec + GUARD_BITS;
    let third = Ball::from_ratio(1, 3, work);
    let v = atanh_series(&third, work).shl(1).with_prec(prec);
    LN2_CACHE.with(|c| c.borrow_mut().insert(prec, v.clone()));
    v
}

impl Ball {
    /// Natural logarithm; the ball must lie strictly above zero.
    pub fn ln(&self) -> Result<Ball> {
        if !self.is_positive() {
            return Err(Error::Domain(
                "logarithm of a ball not strictly positive".into(),
            ));
        }
        let prec = self.prec;
        // Wide balls: ln is increasing, so evaluate the endpoints.
        if self.rad > self.mid.shl(-4) {
            let lo = Ball::exact(self.lower(), prec).ln()?;
            let hi = Ball::exact(self.upper(), prec).ln()?;
            return Ok(lo.hull(&hi));
        }
        let work = prec + GUARD_BITS;
        let mut s = self.mid.ilog2();
        let mut y = self.shl(-s).with_prec(work);
        let ym = y.mid();
        if ym.mul(ym) > Dyadic::from_int(2) {
            s += 1;
            y = y.shl(-1);
        }
        let one = Ball::one(work);
        let z = (&y - &one).div(&(&y + &one))?;
        let mut out = atanh_series(&z, work).shl(1);
        if s != 0 {
            let bits_s = 64 - s.unsigned_abs().leading_zeros();
            out = &out + &(&Ball::from_int(s, work) * &ln2(work + bits_s));
        }
        Ok(out.with_prec(prec))
    }

    /// Exponential; fails for arguments beyond `2^24` in magnitude.
    pub fn exp(&self) -> Result<Ball> {
        let prec = self.prec;
        if self.abs_upper() > Dyadic::pow2(24) {
            return Err(Error::Domain("exponential argument out of range".into()));
        }
        const HALVINGS: i64 = 12;
        let work = prec + GUARD_BITS + HALVINGS as u32 + 8;
        let s = (self.mid.to_f64() / std::f64::consts::LN_2).round() as i64;
        let mut t = self.with_prec(work);
        if s != 0 {
            t = &t - &(&Ball::from_int(s, work) * &ln2(work + 32));
        }
        let t = t.shl(-HALVINGS);
        let tu = t.abs_upper();
        if tu > Dyadic::pow2(-1) {
            // Wide input ball: fall back on monotonicity.
            let lo = Ball::exact(self.lower(), prec).exp()?;
            let hi = Ball::exact(self.upper(), prec).exp()?;
            return Ok(lo.hull(&hi));
        }
        let cutoff = Dyadic::pow2(-(work as i64) - 4);
        let mut sum = Ball::one(work);
        let mut term = Ball::one(work);
        let mut j = 1i64;
        loop {
            term = (&term * &t).div(&Ball::from_int(j, work))?;
            sum = &sum + &term;
            if term.abs_upper() < cutoff {
                break;
            }
            j += 1;
        }
        // With |t| <= 1/2 the remaining tail is below the last term.
        let mut out = sum.add_error(&term.abs_upper());
        for _ in 0..HALVINGS {
            out = out.sqr();
        }
        Ok(out.shl(s).with_prec(prec))
    }

    /// `self^e` for a real exponent ball; base must be strictly positive.
    pub fn pow(&self, e: &Ball) -> Result<Ball> {
        (&self.ln()? * e).exp()
    }
}
