//! Exact binary rationals `man * 2^exp` with directed rounding helpers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{} (~{:e})", self.man, self.exp, self.to_f64())
    }
}

impl Dyadic {
    /// Builds `man * 2^exp`, stripping trailing zero bits of the mantissa.
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        } else {
            Dyadic { man, exp }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        Self::new(v.into(), 0)
    }

    pub fn pow2(exp: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp,
        }
    }

    /// Exact conversion; `None` for non-finite input.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(man) * sign, exp))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    /// Bit length of the mantissa magnitude.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `floor(log2 |x|)`; zero maps to `i64::MIN`.
    pub fn ilog2(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.bits() as i64 - 1 + self.exp
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn shl(&self, n: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + n,
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(other);
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Dyadic {
            man: &self.man * &other.man,
            exp: self.exp + other.exp,
        }
    }

    pub fn half_sum(&self, other: &Self) -> Self {
        self.add(other).shl(-1)
    }

    pub fn lesser<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn greater<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Rounds toward negative infinity to at most `bits` mantissa bits.
    pub fn round_down(&self, bits: u64) -> Self {
        let have = self.bits();
        if have <= bits {
            return self.clone();
        }
        let shift = have - bits;
        // BigInt >> floors for negative values.
        Self::new(&self.man >> shift, self.exp + shift as i64)
    }

    /// Rounds toward positive infinity to at most `bits` mantissa bits
    /// (the result may carry one extra bit after a carry).
    pub fn round_up(&self, bits: u64) -> Self {
        self.neg().round_down(bits).neg()
    }

    /// `floor(self / other)` on a grid fine enough to hold `bits`
    /// significant bits, together with the grid step (an error bound).
    pub fn div_floor(&self, other: &Self, bits: u64) -> (Self, Self) {
        assert!(!other.is_zero(), "division by exact zero");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let shift = (bits as i64 + other.bits() as i64 - self.bits() as i64 + 1).max(0);
        let num = &self.man << shift as u64;
        let (q, r) = num.div_mod_floor(&other.man);
        let e = self.exp - shift - other.exp;
        let step = if r.is_zero() {
            Self::zero()
        } else {
            Self::pow2(e)
        };
        (Self::new(q, e), step)
    }

    pub fn div_down(&self, other: &Self, bits: u64) -> Self {
        self.div_floor(other, bits).0
    }

    pub fn div_up(&self, other: &Self, bits: u64) -> Self {
        self.neg().div_floor(other, bits).0.neg()
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            &self.man >> (-self.exp) as u64
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    /// Floor of the square root of a nonnegative value, to `bits` bits,
    /// with the grid step as error bound.
    pub fn sqrt_floor(&self, bits: u64) -> (Self, Self) {
        assert!(!self.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let mut shift = (2 * bits as i64 + 2 - self.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = &self.man << shift as u64;
        let r = scaled.sqrt();
        let e = (self.exp - shift) / 2;
        (Self::new(r, e), Self::pow2(e))
    }

    pub fn sqrt_down(&self, bits: u64) -> Self {
        self.sqrt_floor(bits).0
    }

    pub fn sqrt_up(&self, bits: u64) -> Self {
        let (r, step) = self.sqrt_floor(bits);
        if r.mul(&r) == *self {
            r
        } else {
            r.add(&step)
        }
    }

    /// Nearest-ish conversion (truncated to 53 bits).
    pub fn to_f64(&self) -> f64 {
        self.to_f64_dir(false)
    }

    /// An `f64` that is `>= self`.
    pub fn to_f64_up(&self) -> f64 {
        if self.is_negative() {
            -self.neg().to_f64_dir(false)
        } else {
            self.to_f64_dir(true)
        }
    }

    /// An `f64` that is `<= self`.
    pub fn to_f64_down(&self) -> f64 {
        -self.neg().to_f64_up()
    }

    // Magnitude truncated (or bumped when `up`) to 53 bits, sign restored.
    fn to_f64_dir(&self, up: bool) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let neg = self.is_negative();
        let mag = self.man.abs();
        let bits = mag.bits();
        let (m, e) = if bits > 53 {
            let shift = bits - 53;
            let mut m = (&mag >> shift).to_u64().unwrap_or(0);
            if up && (&m_big(m) << shift) != mag {
                m += 1;
            }
            (m, self.exp + shift as i64)
        } else {
            (mag.to_u64().unwrap_or(0), self.exp)
        };
        let mut v = ldexp(m as f64, e);
        if up && v == 0.0 {
            v = f64::from_bits(1);
        }
        if neg {
            -v
        } else {
            v
        }
    }

    /// Decimal rendering truncated toward zero after `digits` fractional
    /// digits; the truncation error is below `10^-digits`.
    pub fn to_decimal_trunc(&self, digits: u32) -> String {
        let neg = self.is_negative();
        let mag = self.abs();
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = Dyadic::new(mag.man.clone() * scale, mag.exp).floor();
        let s = scaled.to_string();
        let d = digits as usize;
        let body = if d == 0 {
            s
        } else if s.len() > d {
            format!("{}.{}", &s[..s.len() - d], &s[s.len() - d..])
        } else {
            format!("0.{}{}", "0".repeat(d - s.len()), s)
        };
        if neg && !scaled.is_zero() {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Scientific rendering with `sig` significant digits, rounded up in
    /// magnitude. Intended for nonnegative radii.
    pub fn to_sci_up(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mag = self.abs();
        let log10 = (mag.bits() as f64 - 1.0 + mag.exp as f64) * std::f64::consts::LOG10_2;
        let mut e10 = log10.floor() as i64 - sig as i64 + 1;
        loop {
            let n = scaled_ceil(&mag, -e10);
            let limit = BigInt::from(10u32).pow(sig);
            if n >= limit {
                e10 += 1;
                continue;
            }
            if n < BigInt::from(10u32).pow(sig - 1) && sig > 1 {
                e10 -= 1;
                continue;
            }
            let s = n.to_string();
            let exp = e10 + s.len() as i64 - 1;
            let mant = if s.len() > 1 {
                format!("{}.{}", &s[..1], &s[1..])
            } else {
                s
            };
            return format!("{mant}e{exp}");
        }
    }
}

fn m_big(m: u64) -> BigInt {
    BigInt::from(m)
}

// ceil(x * 10^p) for nonnegative x.
fn scaled_ceil(x: &Dyadic, p: i64) -> BigInt {
    let ten = BigInt::from(10u32);
    if p >= 0 {
        Dyadic::new(&x.man * ten.pow(p as u32), x.exp).ceil()
    } else {
        let den = Dyadic::from_int(ten.pow((-p) as u32));
        x.div_up(&den, 128).ceil()
    }
}

fn ldexp(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.man.sign(), other.man.sign());
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes through bit positions first.
        let (la, lb) = (self.ilog2(), other.ilog2());
        if la != lb {
            let ord = la.cmp(&lb);
            return if sa == Sign::Plus { ord } else { ord.reverse() };
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<&BigInt> for Dyadic {
    fn from(v: &BigInt) -> Self {
        Dyadic::from_int(v.clone())
    }
}
