//! Midpoint-radius ("ball") real arithmetic over exact dyadic midpoints.
//!
//! Every operation returns a ball that contains the exact result for every
//! choice of inputs inside the operand balls. Comparisons only resolve when
//! the balls are disjoint; otherwise they return `None`.

mod complex;
mod dyadic;
mod transcendental;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use complex::ComplexBall;
pub use dyadic::Dyadic;
pub use transcendental::ln2;

use crate::error::{Error, Result};

/// Mantissa bits kept for radii (always rounded upward).
const RAD_BITS: u64 = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Ball {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:e} +/- {:e} @{}]",
            self.mid.to_f64(),
            self.rad.to_f64_up(),
            self.prec
        )
    }
}

fn mag(d: &Dyadic) -> Dyadic {
    d.abs().round_up(RAD_BITS)
}

fn mag_lower(d: &Dyadic) -> Dyadic {
    d.abs().round_down(RAD_BITS)
}

impl Ball {
    fn finish(mid_exact: Dyadic, rad: Dyadic, prec: u32) -> Ball {
        let mid = mid_exact.round_down(prec as u64);
        let err = mid_exact.sub(&mid);
        Ball {
            mid,
            rad: rad.add(&err).round_up(RAD_BITS),
            prec,
        }
    }

    pub fn exact(mid: Dyadic, prec: u32) -> Ball {
        Self::finish(mid, Dyadic::zero(), prec)
    }

    pub fn new(mid: Dyadic, rad: Dyadic, prec: u32) -> Ball {
        assert!(!rad.is_negative(), "negative radius");
        Self::finish(mid, rad, prec)
    }

    pub fn from_int<T: Into<BigInt>>(v: T, prec: u32) -> Ball {
        Self::exact(Dyadic::from_int(v), prec)
    }

    pub fn zero(prec: u32) -> Ball {
        Self::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Ball {
        Self::exact(Dyadic::one(), prec)
    }

    /// The exact value of a finite double (e.g. `0.5`); panics on NaN/inf.
    pub fn from_f64(x: f64, prec: u32) -> Ball {
        Self::exact(Dyadic::from_f64(x).expect("finite f64"), prec)
    }

    /// Ball containing `num / den`.
    pub fn from_ratio<A: Into<BigInt>, B: Into<BigInt>>(num: A, den: B, prec: u32) -> Ball {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Self::from_int(num, prec)
            .div(&Self::from_int(den, prec))
            .expect("exact nonzero denominator")
    }

    /// Smallest ball covering `[lo, hi]`.
    pub fn from_interval(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Ball {
        assert!(lo <= hi, "inverted interval");
        let mid = lo.half_sum(hi);
        let rad = hi.sub(lo).shl(-1);
        Self::finish(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Ball {
        Self::finish(self.mid.clone(), self.rad.clone(), prec)
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// Upper bound of `|x|` over the ball.
    pub fn abs_upper(&self) -> Dyadic {
        mag(&self.mid).add(&self.rad)
    }

    /// Lower bound of `|x|` over the ball (zero if the ball contains 0).
    pub fn abs_lower(&self) -> Dyadic {
        let d = self.mid.abs().sub(&self.rad);
        if d.is_negative() {
            Dyadic::zero()
        } else {
            d
        }
    }

    pub fn width(&self) -> Dyadic {
        self.rad.shl(1)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper().to_f64_up()
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower().to_f64_down()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lower() <= *x && *x <= self.upper()
    }

    pub fn contains_int(&self, v: &BigInt) -> bool {
        self.contains(&Dyadic::from(v))
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Dyadic::zero())
    }

    /// `true` if `self` lies inside `other`.
    pub fn subset_of(&self, other: &Ball) -> bool {
        other.lower() <= self.lower() && self.upper() <= other.upper()
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    /// Certified `self < other`.
    pub fn lt(&self, other: &Ball) -> Option<bool> {
        if self.upper() < other.lower() {
            Some(true)
        } else if self.lower() >= other.upper() {
            Some(false)
        } else {
            None
        }
    }

    /// Certified `self <= other`.
    pub fn le(&self, other: &Ball) -> Option<bool> {
        if self.upper() <= other.lower() {
            Some(true)
        } else if self.lower() > other.upper() {
            Some(false)
        } else {
            None
        }
    }

    pub fn gt(&self, other: &Ball) -> Option<bool> {
        other.lt(self)
    }

    pub fn ge(&self, other: &Ball) -> Option<bool> {
        other.le(self)
    }

    /// Widens the radius by `extra`.
    pub fn add_error(&self, extra: &Dyadic) -> Ball {
        Ball {
            mid: self.mid.clone(),
            rad: self.rad.add(&mag(extra)).round_up(RAD_BITS),
            prec: self.prec,
        }
    }

    /// Convex hull of two balls.
    pub fn hull(&self, other: &Ball) -> Ball {
        let lo = self.lower().lesser(&other.lower()).clone();
        let hi = self.upper().greater(&other.upper()).clone();
        Self::from_interval(&lo, &hi, self.prec.max(other.prec))
    }

    /// Intersection, or `None` if the balls are disjoint.
    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        let (sl, ol, su, ou) = (self.lower(), other.lower(), self.upper(), other.upper());
        let lo = sl.greater(&ol);
        let hi = su.lesser(&ou);
        if lo > hi {
            None
        } else {
            Some(Self::from_interval(lo, hi, self.prec.max(other.prec)))
        }
    }

    /// Multiplication by `2^n` (exact).
    pub fn shl(&self, n: i64) -> Ball {
        Ball {
            mid: self.mid.shl(n),
            rad: self.rad.shl(n),
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Ball {
        if self.contains_zero() {
            let hi = self.abs_upper();
            Self::from_interval(&Dyadic::zero(), &hi, self.prec)
        } else if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn sqr(&self) -> Ball {
        if self.contains_zero() {
            let hi = self.abs_upper();
            let hi2 = hi.mul(&hi).round_up(RAD_BITS.max(self.prec as u64));
            return Self::from_interval(&Dyadic::zero(), &hi2, self.prec);
        }
        self * self
    }

    pub fn div(&self, other: &Ball) -> Result<Ball> {
        if other.contains_zero() {
            return Err(Error::DivisionByAmbiguousZero);
        }
        let prec = self.prec.max(other.prec);
        let (q, step) = self.mid.div_floor(&other.mid, prec as u64 + 2);
        let bm = other.mid.abs();
        let mut rad = step;
        if !self.rad.is_zero() || !other.rad.is_zero() {
            let num = mag(&self.mid)
                .mul(&other.rad)
                .add(&mag(&bm).mul(&self.rad))
                .round_up(RAD_BITS);
            let den = mag_lower(&bm)
                .mul(&mag_lower(&bm.sub(&other.rad)))
                .round_down(RAD_BITS);
            rad = rad.add(&num.div_up(&den, RAD_BITS));
        }
        Ok(Self::finish(q, rad, prec))
    }

    pub fn recip(&self) -> Result<Ball> {
        Ball::one(self.prec).div(self)
    }

    pub fn pow_u(&self, mut n: u64) -> Ball {
        let mut base = self.clone();
        let mut acc = Ball::one(self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn pow_i(&self, n: i64) -> Result<Ball> {
        if n >= 0 {
            Ok(self.pow_u(n as u64))
        } else {
            self.pow_u(n.unsigned_abs()).recip()
        }
    }

    pub fn sqrt(&self) -> Result<Ball> {
        if self.lower().is_negative() {
            return Err(Error::Domain("sqrt of a ball reaching below zero".into()));
        }
        let prec = self.prec as u64;
        if self.mid.is_zero() {
            let hi = self.rad.sqrt_up(RAD_BITS);
            return Ok(Self::from_interval(&Dyadic::zero(), &hi, self.prec));
        }
        let (root, step) = self.mid.sqrt_floor(prec + 2);
        let mut rad = step;
        if !self.rad.is_zero() {
            // |sqrt(x) - sqrt(m)| <= r / sqrt(m)
            let sm = self.mid.sqrt_down(RAD_BITS);
            rad = rad.add(&self.rad.div_up(&sm, RAD_BITS));
        }
        Ok(Self::finish(root, rad, self.prec))
    }

    /// Square root of the part of the ball at or above zero.
    pub fn sqrt_nonneg(&self) -> Result<Ball> {
        let hi = self.upper();
        if hi.is_negative() {
            return Err(Error::Domain("sqrt of a negative ball".into()));
        }
        if self.lower().is_positive() {
            return self.sqrt();
        }
        let top = hi.sqrt_up(RAD_BITS.max(self.prec as u64));
        Ok(Self::from_interval(&Dyadic::zero(), &top, self.prec))
    }

    /// Certified floor: the integer shared by every point of the ball.
    pub fn floor(&self) -> Option<BigInt> {
        let lo = self.lower().floor();
        let hi = self.upper().floor();
        (lo == hi).then_some(lo)
    }

    /// Smallest integer that is >= every point of the ball.
    pub fn ceil_upper(&self) -> BigInt {
        self.upper().ceil()
    }

    /// Ball enclosing `min_n |x - n|` over all integers `n`.
    pub fn nearest_int_distance(&self) -> Ball {
        let lo = self.lower();
        let hi = self.upper();
        let half = Dyadic::pow2(-1);
        let dist = |x: &Dyadic| {
            let n = Dyadic::from(&x.add(&half).floor());
            x.sub(&n).abs()
        };
        let (dl, dh) = (dist(&lo), dist(&hi));
        let dmin = if lo.ceil() <= hi.floor() {
            Dyadic::zero()
        } else {
            dl.lesser(&dh).clone()
        };
        let dmax = if lo.sub(&half).ceil() <= hi.sub(&half).floor() {
            half
        } else {
            dl.greater(&dh).clone()
        };
        Self::from_interval(&dmin, &dmax, self.prec)
    }

    /// Ball midpoint rendered with enough decimal digits for its precision.
    /// The decimal truncation error is folded into [`BallDoc::rad`].
    pub fn to_doc(&self) -> BallDoc {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 2;
        let mid = self.mid.to_decimal_trunc(digits);
        let trunc = Dyadic::from_int(1)
            .div_up(&Dyadic::from_int(BigInt::from(10u32).pow(digits)), RAD_BITS);
        let rad = self.rad.add(&trunc);
        BallDoc {
            mid,
            rad: rad.to_sci_up(3),
            bits: self.prec,
        }
    }
}

/// Serialized form of a ball: `{mid, rad, bits}` with decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallDoc {
    pub mid: String,
    pub rad: String,
    pub bits: u32,
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, rhs: &Ball) -> Ball {
        Ball::finish(
            self.mid.add(&rhs.mid),
            self.rad.add(&rhs.rad),
            self.prec.max(rhs.prec),
        )
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, rhs: &Ball) -> Ball {
        Ball::finish(
            self.mid.sub(&rhs.mid),
            self.rad.add(&rhs.rad),
            self.prec.max(rhs.prec),
        )
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, rhs: &Ball) -> Ball {
        let mid = self.mid.mul(&rhs.mid);
        let mut rad = Dyadic::zero();
        if !rhs.rad.is_zero() {
            rad = rad.add(&mag(&self.mid).mul(&rhs.rad));
        }
        if !self.rad.is_zero() {
            rad = rad.add(&mag(&rhs.mid).mul(&self.rad));
            rad = rad.add(&self.rad.mul(&rhs.rad));
        }
        Ball::finish(mid, rad, self.prec.max(rhs.prec))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Ball> for Ball {
            type Output = Ball;
            fn $m(self, rhs: &Ball) -> Ball {
                (&self).$m(rhs)
            }
        }
        impl $tr<Ball> for &Ball {
            type Output = Ball;
            fn $m(self, rhs: Ball) -> Ball {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl PartialOrd for Ball {
    /// Defined only when the balls are disjoint or identical points.
    fn partial_cmp(&self, other: &Ball) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() {
            return Some(self.mid.cmp(&other.mid));
        }
        match self.lt(other) {
            Some(true) => Some(Ordering::Less),
            _ => match other.lt(self) {
                Some(true) => Some(Ordering::Greater),
                _ => None,
            },
        }
    }
}
