//! Matveev's lower bound for linear forms in logarithms, the explicit
//! constant chains bounding `m` by `ell` and `ell` by `k`, and the
//! power-of-two approximation used for large `k`.
//!
//! Every chain step is a certified inequality `lhs <= rhs` between
//! enclosures, so a rounded constant can only be accepted when it really
//! rounds the exact expression in the safe direction.

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::algnum::{dominant_root, root_bracket_lower, weight_g};
use crate::ball::Ball;
use crate::bigseq::kbonacci;
use crate::error::{Error, Result};
use crate::precision::{certify, ladder};

const CHAIN_BITS: u32 = 128;

/// Inputs of Matveev's theorem for a form in `t` logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatveevParams {
    pub t: u32,
    /// Degree of the number field.
    pub d: f64,
    /// Bound on the absolute values of the integer coefficients.
    pub b: f64,
    pub a: Vec<f64>,
}

impl MatveevParams {
    pub fn new(t: u32, d: f64, b: f64, a: Vec<f64>) -> Result<Self> {
        let p = MatveevParams { t, d, b, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 1 || self.a.len() != self.t as usize {
            return Err(Error::Domain(format!(
                "expected {} height bounds, got {}",
                self.t,
                self.a.len()
            )));
        }
        if !(self.d >= 1.0 && self.d.is_finite()) {
            return Err(Error::Domain(format!(
                "degree bound must be >= 1, got {}",
                self.d
            )));
        }
        if !(self.b >= 3.0 && self.b.is_finite()) {
            return Err(Error::Domain(format!(
                "coefficient bound must be >= 3, got {}",
                self.b
            )));
        }
        if let Some(a) = self.a.iter().find(|a| !(**a >= 0.16 && a.is_finite())) {
            return Err(Error::Domain(format!("height bound {a} is below 0.16")));
        }
        Ok(())
    }
}

/// `1.4 * 30^(t+3) * t^4.5`.
pub fn matveev_constant(t: u32, prec: u32) -> Ball {
    let t_ball = Ball::from_int(t, prec);
    let root_t = t_ball.sqrt().expect("t >= 1");
    let pow30 = Ball::from_int(BigInt::from(30u32).pow(t + 3), prec);
    &(&Ball::from_ratio(7, 5, prec) * &pow30) * &(&t_ball.pow_u(4) * &root_t)
}

/// Enclosure of `-1.4 * 30^(t+3) * t^4.5 * D^2 (1 + log D)(1 + log B) A_1...A_t`.
pub fn matveev_log_lower_ball(p: &MatveevParams, prec: u32) -> Result<Ball> {
    p.validate()?;
    let one = Ball::one(prec);
    let d = Ball::from_f64(p.d, prec);
    let b = Ball::from_f64(p.b, prec);
    let mut e = &(&matveev_constant(p.t, prec) * &d.sqr()) * &(&one + &d.ln()?);
    e = &e * &(&one + &b.ln()?);
    for a in &p.a {
        e = &e * &Ball::from_f64(*a, prec);
    }
    Ok(-&e)
}

/// Natural log of Matveev's lower bound, rounded towards minus infinity.
pub fn matveev_log_lower(p: &MatveevParams) -> Result<f64> {
    Ok(matveev_log_lower_ball(p, CHAIN_BITS)?.lower_f64())
}

fn ln_int(v: u64, prec: u32) -> Ball {
    Ball::from_int(v, prec).ln().expect("positive integer")
}

fn cube(b: &Ball) -> Ball {
    b.pow_u(3)
}

/// `4.4e14 * ell^8 * log^3 ell` as a ball.
pub fn bound_m_of_ell_ball(ell: u64, prec: u32) -> Result<Ball> {
    if ell < 3 {
        return Err(Error::Domain(format!(
            "the m-bound needs ell >= 3, got {ell}"
        )));
    }
    Ok(m_of_ell_real(&Ball::from_int(ell, prec)))
}

fn m_of_ell_real(ell: &Ball) -> Ball {
    let prec = ell.prec();
    let c = Ball::from_int(440_000_000_000_000u64, prec);
    &(&c * &ell.pow_u(8)) * &cube(&ell.ln().expect("ell >= 3"))
}

/// Upper bound on `m` (and `n`) for a solution with the given `ell`.
pub fn bound_m_of_ell(ell: u64) -> Result<f64> {
    Ok(bound_m_of_ell_ball(ell, CHAIN_BITS)?.upper_f64())
}

/// `1.8e16 * k^3 * log^3 k` as a ball.
pub fn bound_ell_of_k_ball(k: u64, prec: u32) -> Result<Ball> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    let c = Ball::from_int(18_000_000_000_000_000u64, prec);
    Ok(&(&c * &Ball::from_int(k, prec).pow_u(3)) * &cube(&ln_int(k, prec)))
}

pub fn bound_ell_of_k(k: u64) -> Result<f64> {
    Ok(bound_ell_of_k_ball(k, CHAIN_BITS)?.upper_f64())
}

/// `M_k = 3e148 * k^24 * log^27 k` as a ball.
#[allow(non_snake_case)]
pub fn bound_M_of_k_ball(k: u64, prec: u32) -> Result<Ball> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    let c = Ball::from_int(BigInt::from(3u32) * BigInt::from(10u32).pow(148), prec);
    Ok(&(&c * &Ball::from_int(k, prec).pow_u(24)) * &ln_int(k, prec).pow_u(27))
}

#[allow(non_snake_case)]
pub fn bound_M_of_k(k: u64) -> Result<f64> {
    Ok(bound_M_of_k_ball(k, CHAIN_BITS)?.upper_f64())
}

/// `M_k` rounded up to an integer.
pub fn cap_m_of_k(k: u64) -> Result<BigUint> {
    let b = bound_M_of_k_ball(k, 1024)?;
    Ok(b.ceil_upper().to_biguint().expect("positive"))
}

/// `2 A log A`, which bounds every `x > e` with `x / log x < A`.
pub fn solve_x_over_logx_ball(a: &Ball) -> Result<Ball> {
    if a.lt(&Ball::from_int(3, a.prec())) != Some(false) {
        return Err(Error::Domain("x / log x bound needs A >= 3".into()));
    }
    Ok(&a.shl(1) * &a.ln()?)
}

pub fn solve_x_over_logx(a: f64) -> Result<f64> {
    if !(a >= 3.0 && a.is_finite()) {
        return Err(Error::Domain(format!(
            "x / log x bound needs A >= 3, got {a}"
        )));
    }
    Ok(solve_x_over_logx_ball(&Ball::from_f64(a, CHAIN_BITS))?.upper_f64())
}

/// One certified step `lhs <= rhs` of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    /// Upper end of the recomputed left-hand side.
    pub lhs: f64,
    /// Lower end of the stated right-hand side.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundChainReport {
    pub input: u64,
    pub steps: Vec<ChainStep>,
    pub final_bound: f64,
}

impl BoundChainReport {
    pub fn value_of(&self, name: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.name == name)
    }
}

struct Chain {
    input: u64,
    bits: u32,
    steps: Vec<ChainStep>,
}

impl Chain {
    fn check(&mut self, name: &str, lhs: Ball, rhs: Ball) -> Result<()> {
        let holds = certify(lhs.le(&rhs), name, self.bits)?;
        if !holds {
            return Err(Error::ChainViolation {
                step: name.to_string(),
                input: self.input,
            });
        }
        self.steps.push(ChainStep {
            name: name.to_string(),
            lhs: lhs.upper_f64(),
            rhs: rhs.lower_f64(),
            holds,
        });
        Ok(())
    }
}

/// Certifies `0.4 < log alpha` for every `k >= 2` via `alpha > 2(1 - 2^-k) >= 3/2`.
fn check_log_alpha(chain: &mut Chain) -> Result<()> {
    let p = chain.bits;
    chain.check(
        "alpha_above_1.5",
        Ball::from_ratio(3, 2, p),
        Ball::exact(root_bracket_lower(2), p),
    )?;
    chain.check(
        "log_alpha_above_0.4",
        Ball::from_ratio(2, 5, p),
        Ball::from_ratio(3, 2, p).ln()?,
    )
}

/// Replays the chain ending in `m < 4.4e14 ell^8 log^3 ell`.
pub fn replay_m_chain(ell: u64) -> Result<BoundChainReport> {
    if ell < 3 {
        return Err(Error::Domain(format!(
            "the m-chain needs ell >= 3, got {ell}"
        )));
    }
    ladder(CHAIN_BITS, |bits| m_chain_at(ell, bits))
}

fn m_chain_at(ell: u64, p: u32) -> Result<BoundChainReport> {
    let mut c = Chain {
        input: ell,
        bits: p,
        steps: Vec::new(),
    };
    let int = |v: u64| Ball::from_int(v, p);
    let l = int(ell);
    let ln_l = l.ln()?;
    let ln_ln_l = ln_l.ln()?;

    // For t = 3: D = ell^2, A_1 A_3 = (0.7 ell)^2, A_2 = 2 ell^2 log(4 ell + 4).
    let c15 = &matveev_constant(3, p) * &Ball::from_ratio(49, 50, p);
    c.check("matveev_1.5e11", c15, int(150_000_000_000))?;
    c.check(
        "one_plus_two_log_ell",
        &Ball::one(p) + &ln_l.shl(1),
        &int(3) * &ln_l,
    )?;
    c.check(
        "log_4ell_plus_4",
        ln_int(4 * ell + 4, p),
        &Ball::from_ratio(13, 5, p) * &ln_l,
    )?;
    // 1 + log(m - 1) <= 2 log(m - 1) once m - 1 >= 3.
    c.check("one_plus_log_m", Ball::one(p), ln_int(3, p))?;
    let c24 = &int(150_000_000_000 * 3 * 2) * &Ball::from_ratio(13, 5, p);
    c.check("constant_2.4e12", c24, int(2_400_000_000_000))?;

    check_log_alpha(&mut c)?;
    // (m-1) log alpha < log 4 + 2.4e12 X log(m-1), X = ell^8 log^2 ell.
    let x = &l.pow_u(8) * &ln_l.sqr();
    let two_fifths = Ball::from_ratio(2, 5, p);
    let spill = ln_int(4, p).div(&(&(&two_fifths * &ln_int(3, p)) * &x))?;
    let c61 = &int(2_400_000_000_000).div(&two_fifths)? + &spill;
    c.check("constant_6.1e12", c61, int(6_100_000_000_000))?;

    let a = &int(6_100_000_000_000) * &x;
    c.check("x_over_log_x_premise", int(3), a.clone())?;
    c.check("log_6.1e12_below_30", ln_int(6_100_000_000_000, p), int(30))?;
    let log_a = &(&int(30) + &(&int(8) * &ln_l)) + &ln_ln_l.shl(1);
    c.check("absorb_36_log_ell", log_a, &int(36) * &ln_l)?;
    // m < 1 + 2 * 6.1e12 * 36 * ell^8 log^3 ell.
    let tail = Ball::one(p).div(&(&l.pow_u(8) * &cube(&ln_l)))?;
    let c44 = &int(2 * 6_100_000_000_000 * 36) + &tail;
    c.check("constant_4.4e14", c44, int(440_000_000_000_000))?;

    Ok(BoundChainReport {
        input: ell,
        steps: c.steps,
        final_bound: m_of_ell_real(&l).upper_f64(),
    })
}

/// Certifies `log(4.4e14 ell^8 log^3 ell) < 45 log ell`.
pub fn check_log_m_absorption(ell: u64) -> Result<bool> {
    if ell < 3 {
        return Err(Error::Domain(format!("needs ell >= 3, got {ell}")));
    }
    ladder(CHAIN_BITS, |p| {
        let ln_l = ln_int(ell, p);
        let lhs = m_of_ell_real(&Ball::from_int(ell, p)).ln()?;
        certify(
            lhs.lt(&(&Ball::from_int(45, p) * &ln_l)),
            "log m absorption",
            p,
        )
    })
}

/// Replays the chain ending in `ell < 1.8e16 k^3 log^3 k`.
pub fn replay_ell_chain(k: u64) -> Result<BoundChainReport> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    ladder(CHAIN_BITS, |bits| ell_chain_at(k, bits))
}

fn ell_chain_at(k: u64, p: u32) -> Result<BoundChainReport> {
    let mut c = Chain {
        input: k,
        bits: p,
        steps: Vec::new(),
    };
    let int = |v: u64| Ball::from_int(v, p);
    let kb = int(k);
    let ln_k = kb.ln()?;
    let one = Ball::one(p);

    // For t = 3: D = k, A_1 = k log(4k + 4), A_2 = A_3 = 0.7.
    let c1 = &matveev_constant(3, p) * &Ball::from_ratio(49, 100, p);
    c.check("matveev_C1_0.75e11", c1, int(75_000_000_000))?;

    // ell log(2)/2 - log 5 < C_1 k^3 (1 + log k) log(4k + 4) (1 + log(m - 1)),
    // then 1 + log(m - 1) <= 2 log m and log m >= log 3.
    let two_over_ln2 = int(2).div(&ln_int(2, p))?;
    let shape = (&(&one + &ln_k) * &ln_int(4 * k + 4, p)).div(&ln_k.sqr())?;
    let main = &int(2 * 75_000_000_000) * &shape;
    let spill = ln_int(5, p).div(&(&(&kb.pow_u(3) * &ln_k.sqr()) * &ln_int(3, p)))?;
    let c47 = &two_over_ln2 * &(&main + &spill);
    c.check("constant_4.7e12", c47, int(4_700_000_000_000))?;

    // ell > k, and the absorption inequality is increasing in ell past 3.
    let ell_min = (k + 1).max(3);
    let ln_l = ln_int(ell_min, p);
    let log_m = m_of_ell_real(&int(ell_min)).ln()?;
    c.check("absorb_45_log_ell", log_m, &int(45) * &ln_l)?;
    c.check(
        "constant_2.2e14",
        int(4_700_000_000_000 * 45),
        int(220_000_000_000_000),
    )?;

    let a = &(&int(220_000_000_000_000) * &kb.pow_u(3)) * &ln_k.sqr();
    c.check("x_over_log_x_premise", int(3), a)?;
    let log_a = &(&ln_int(220_000_000_000_000, p) + &(&int(3) * &ln_k)) + &ln_k.ln()?.shl(1);
    c.check("absorb_39_log_k", log_a, &int(39) * &ln_k)?;
    c.check(
        "constant_1.8e16",
        int(2 * 220_000_000_000_000 * 39),
        int(18_000_000_000_000_000),
    )?;

    Ok(BoundChainReport {
        input: k,
        steps: c.steps,
        final_bound: bound_ell_of_k_ball(k, p)?.upper_f64(),
    })
}

/// Certifies that `m < 4.4e14 L^8 log^3 L` with `L = 1.8e16 k^3 log^3 k`
/// stays below `M_k`.
pub fn check_m_cap_domination(k: u64) -> Result<bool> {
    ladder(CHAIN_BITS, |p| {
        let ell = bound_ell_of_k_ball(k, p)?;
        let m = m_of_ell_real(&ell);
        certify(m.le(&bound_M_of_k_ball(k, p)?), "m cap domination", p)
    })
}

/// Certifies `M_k < 2^(k/2)`, the premise of the large-`k` argument.
pub fn check_large_k_premise(k: u64) -> Result<bool> {
    ladder(CHAIN_BITS, |p| {
        let lhs = bound_M_of_k_ball(k, p)?.ln()?;
        let rhs = &Ball::from_ratio(k, 2, p) * &ln_int(2, p);
        certify(lhs.lt(&rhs), "M_k below 2^(k/2)", p)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LargeKVerdict {
    Contradiction,
    Inconclusive,
}

/// Outcome of comparing `2^(k/2)` with `22`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeKWitness {
    pub k: u64,
    /// Lower end of `2^(k/2)`.
    pub two_pow_half_k: f64,
    pub threshold: u32,
    pub verdict: LargeKVerdict,
    /// Whether `M_k < 2^(k/2)` holds, which the argument needs to apply.
    pub premise_holds: bool,
}

impl LargeKWitness {
    /// The case is closed only when both the premise and the arithmetic hold.
    pub fn closes_case(&self) -> bool {
        self.premise_holds && self.verdict == LargeKVerdict::Contradiction
    }
}

/// Checks `1/2 <= 11 / 2^(k/2)`, i.e. `2^(k/2) < 22`; its failure refutes
/// any solution whose `m` stays below `2^(k/2)`.
pub fn large_k_contradiction(k: u64) -> Result<LargeKWitness> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    // 2^(k/2) >= 22  <=>  2^k >= 484.
    let contradiction = k >= 64 || (1u64 << k) >= 484;
    let two_pow = Ball::from_int(2, 64).pow(&Ball::from_ratio(k, 2, 64))?;
    Ok(LargeKWitness {
        k,
        two_pow_half_k: two_pow.lower_f64(),
        threshold: 22,
        verdict: if contradiction {
            LargeKVerdict::Contradiction
        } else {
            LargeKVerdict::Inconclusive
        },
        premise_holds: check_large_k_premise(k)?,
    })
}

fn require_coincidence(k: u64, m: i64, ell: u64, n: i64) -> Result<()> {
    let lhs = kbonacci(k as u32, m)?;
    let rhs = kbonacci(ell as u32, n)?;
    if lhs != rhs {
        return Err(Error::Domain(format!(
            "F_{m}^({k}) = {lhs} differs from F_{n}^({ell}) = {rhs}"
        )));
    }
    Ok(())
}

/// `|2^(e-2) - g(beta, j) beta^(i-1)| < 5 * 2^(e-2) / 2^(h/2)` with `beta`
/// the dominant root of `psi_j`.
fn gap_holds(j: u64, i: i64, e: i64, h: u64) -> Result<bool> {
    if i < 1 || e < 2 {
        return Err(Error::Domain(format!(
            "indices must satisfy m >= 1, n >= 2, got {i}, {e}"
        )));
    }
    ladder(128 + 2 * i.max(e) as u32, |bits| {
        let beta = dominant_root(j as u32, bits)?.value;
        let approx = &weight_g(&beta, j)? * &beta.pow_u((i - 1) as u64);
        let power = Ball::one(bits).shl(e - 2);
        let lhs = (&power - &approx).abs();
        let mut rhs = Ball::from_int(5, bits).shl(e - 2 - (h / 2) as i64);
        if h % 2 == 1 {
            rhs = rhs.div(&Ball::from_int(2, bits).sqrt()?)?;
        }
        certify(lhs.lt(&rhs), "power-of-two gap", bits)
    })
}

/// Certifies `|2^(n-2) - g(alpha, k) alpha^(m-1)| < 5 * 2^(n-2) / 2^(ell/2)`
/// for a pair with `F_m^(k) = F_n^(ell)`.
pub fn power2_gap_check(ell: u64, k: u64, m: i64, n: i64) -> Result<bool> {
    require_coincidence(k, m, ell, n)?;
    gap_holds(k, m, n, ell)
}

/// The same estimate with the roles swapped:
/// `|2^(m-2) - g(phi, ell) phi^(n-1)| < 5 * 2^(m-2) / 2^(k/2)`.
pub fn power2_gap_check_mirror(ell: u64, k: u64, m: i64, n: i64) -> Result<bool> {
    require_coincidence(k, m, ell, n)?;
    gap_holds(ell, n, m, k)
}
