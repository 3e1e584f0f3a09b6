//! Rectangular complex balls: independent real balls for both parts.

use std::ops::{Add, Mul, Sub};

use super::{Ball, Dyadic};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        ComplexBall { re, im }
    }

    pub fn real(re: Ball) -> Self {
        let prec = re.prec();
        ComplexBall {
            re,
            im: Ball::zero(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::real(Ball::one(prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexBall {
            re: Ball::from_f64(re, prec),
            im: Ball::from_f64(im, prec),
        }
    }

    /// Square box around `center` that contains the disk of radius `r`.
    pub fn disk(center_re: &Dyadic, center_im: &Dyadic, r: &Dyadic, prec: u32) -> Self {
        ComplexBall {
            re: Ball::new(center_re.clone(), r.clone(), prec),
            im: Ball::new(center_im.clone(), r.clone(), prec),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexBall {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> Ball {
        &self.re.sqr() + &self.im.sqr()
    }

    pub fn abs(&self) -> Result<Ball> {
        self.norm_sqr().sqrt_nonneg()
    }

    pub fn scale(&self, s: &Ball) -> Self {
        ComplexBall {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn div(&self, other: &ComplexBall) -> Result<ComplexBall> {
        let den = other.norm_sqr();
        let num = self * &other.conj();
        Ok(ComplexBall {
            re: num.re.div(&den)?,
            im: num.im.div(&den)?,
        })
    }

    pub fn pow_u(&self, mut n: u64) -> Self {
        let prec = self.re.prec().max(self.im.prec());
        let mut base = self.clone();
        let mut acc = ComplexBall::one(prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ComplexBall {
    type Output = ComplexBall;
    fn add(self, rhs: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &ComplexBall {
    type Output = ComplexBall;
    fn sub(self, rhs: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &ComplexBall {
    type Output = ComplexBall;
    fn mul(self, rhs: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}
