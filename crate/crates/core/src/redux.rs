//! Certified continued fractions and the Dujella–Pethő reduction applied to
//! `gamma_k = log alpha / log 2` and `mu_k = log g(alpha, k) / log 2`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algnum::{dominant_root, weight_g};
use crate::ball::{ln2, Ball, BallDoc, Dyadic};
use crate::error::{Error, Result};
use crate::precision::ladder;

/// Convergent budget used by [`reduce_for_k`].
pub const REDUCE_MAX_CONVERGENTS: usize = 4096;

/// `gamma_k` and `mu_k` enclosed at `precision_bits`.
pub fn gamma_mu(k: u32, precision_bits: u32) -> Result<(Ball, Ball)> {
    let work = precision_bits + 32;
    let alpha = dominant_root(k, work)?.value;
    let l2 = ln2(work);
    let gamma = alpha.ln()?.div(&l2)?;
    let mu = weight_g(&alpha, k as u64)?.ln()?.div(&l2)?;
    Ok((
        gamma.with_prec(precision_bits),
        mu.with_prec(precision_bits),
    ))
}

/// Partial quotients that hold for every point of `x`, with convergents.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    pub x: Ball,
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Set when `x` is an exact rational whose expansion ended.
    pub terminated: bool,
}

impl ContinuedFraction {
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `p_i q_{i-1} - p_{i-1} q_i` for `i >= 1`.
    pub fn determinant(&self, i: usize) -> BigInt {
        let (p, q) = &self.convergents[i];
        let (pp, qp) = &self.convergents[i - 1];
        p * qp - pp * q
    }
}

/// Exact Euclid steps on the rational `num / den`.
struct Euclid {
    num: BigInt,
    den: BigInt,
}

impl Euclid {
    fn new(d: &Dyadic) -> Self {
        let e = d.exponent();
        if e >= 0 {
            Euclid {
                num: d.mantissa() << e as u64,
                den: BigInt::one(),
            }
        } else {
            Euclid {
                num: d.mantissa().clone(),
                den: BigInt::one() << (-e) as u64,
            }
        }
    }

    fn next_quotient(&mut self) -> Option<BigInt> {
        if self.den.is_zero() {
            return None;
        }
        let (a, r) = self.num.div_mod_floor(&self.den);
        self.num = std::mem::replace(&mut self.den, r);
        Some(a)
    }
}

/// Expands as far as the ball allows, up to `max` quotients.
pub fn expand_cf_available(x: &Ball, max: usize) -> ContinuedFraction {
    let mut lo = Euclid::new(&x.lower());
    let mut hi = Euclid::new(&x.upper());
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    let mut terminated = false;
    while quotients.len() < max {
        match (lo.next_quotient(), hi.next_quotient()) {
            (Some(a), Some(b)) if a == b => {
                let p = &a * &p1 + &p2;
                let q = &a * &q1 + &q2;
                p2 = std::mem::replace(&mut p1, p.clone());
                q2 = std::mem::replace(&mut q1, q.clone());
                quotients.push(a);
                convergents.push((p, q));
            }
            (None, None) => {
                terminated = true;
                break;
            }
            _ => break,
        }
    }
    ContinuedFraction {
        x: x.clone(),
        quotients,
        convergents,
        terminated,
    }
}

/// Certified quotients `a_0, ..., a_count` of `x`. A rational input may stop
/// earlier with `terminated` set.
pub fn expand_cf(x: &Ball, count: usize) -> Result<ContinuedFraction> {
    let cf = expand_cf_available(x, count + 1);
    if cf.len() <= count && !cf.terminated {
        return Err(Error::PrecisionExhausted {
            what: format!("only {} partial quotients certified", cf.len()),
            bits: x.prec(),
        });
    }
    Ok(cf)
}

/// `||x||`, the distance to the nearest integer.
pub fn nearest_int_distance(x: &Ball) -> Ball {
    x.nearest_int_distance()
}

/// Base `B` of the decay `A * B^(-e)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExpBase {
    /// `2^(1/2)`, with `log B = (log 2) / 2` taken exactly from `log 2`.
    Sqrt2,
    Value(Ball),
}

impl ExpBase {
    pub fn ln(&self, prec: u32) -> Result<Ball> {
        match self {
            ExpBase::Sqrt2 => Ok(ln2(prec).shl(-1)),
            ExpBase::Value(b) => b.with_prec(prec.max(b.prec())).ln(),
        }
    }

    pub fn ball(&self, prec: u32) -> Ball {
        match self {
            ExpBase::Sqrt2 => Ball::from_int(2, prec).sqrt().expect("positive"),
            ExpBase::Value(b) => b.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCertificate {
    pub k: Option<u32>,
    pub m_cap: BigUint,
    pub gamma: Ball,
    pub mu: Ball,
    pub q: BigUint,
    /// Index of the convergent whose denominator is `q`.
    pub convergent_index: usize,
    pub epsilon: Ball,
    pub a: Ball,
    pub b: ExpBase,
    /// `log(A q / eps_lower) / log B`, rounded up.
    pub ell_bound: f64,
}

/// Canonical serialized certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub k: Option<u32>,
    #[serde(rename = "M")]
    pub m_cap: String,
    pub gamma: BallDoc,
    pub mu: BallDoc,
    pub q: String,
    pub epsilon: BallDoc,
    #[serde(rename = "A")]
    pub a: BallDoc,
    #[serde(rename = "B")]
    pub b: BallDoc,
    pub ell_bound: f64,
}

impl ReductionCertificate {
    pub fn to_doc(&self) -> CertificateDoc {
        CertificateDoc {
            k: self.k,
            m_cap: self.m_cap.to_string(),
            gamma: self.gamma.to_doc(),
            mu: self.mu.to_doc(),
            q: self.q.to_string(),
            epsilon: self.epsilon.to_doc(),
            a: self.a.to_doc(),
            b: self.b.ball(self.gamma.prec()).to_doc(),
            ell_bound: self.ell_bound,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("certificate serializes")
    }

    /// Smallest integer exponent covered by the certificate.
    pub fn ell_threshold(&self) -> u64 {
        self.ell_bound.ceil() as u64
    }

    /// Re-checks the certificate invariants from its own fields.
    pub fn verify(&self) -> Result<()> {
        if self.q <= &self.m_cap * 6u32 {
            return Err(Error::Invariant("q does not exceed 6M".into()));
        }
        if !self.epsilon.is_positive() {
            return Err(Error::Invariant("epsilon is not certified positive".into()));
        }
        let prec = self.gamma.prec();
        let qb = Ball::from_int(BigInt::from(self.q.clone()), prec);
        let m = Ball::from_int(BigInt::from(self.m_cap.clone()), prec);
        let eps = &(&self.mu * &qb).nearest_int_distance()
            - &(&m * &(&self.gamma * &qb).nearest_int_distance());
        if eps.intersect(&self.epsilon).is_none() {
            return Err(Error::Invariant(
                "epsilon does not match its definition".into(),
            ));
        }
        let ell = ell_bound_ball(&self.a, &self.q, &self.epsilon, &self.b, prec)?;
        if ell.upper_f64() > self.ell_bound {
            return Err(Error::Invariant("ell bound is not rounded up".into()));
        }
        Ok(())
    }
}

fn ell_bound_ball(a: &Ball, q: &BigUint, eps: &Ball, b: &ExpBase, prec: u32) -> Result<Ball> {
    let eps_lo = Ball::exact(eps.lower(), prec);
    let arg = (a * &Ball::from_int(BigInt::from(q.clone()), prec)).div(&eps_lo)?;
    arg.ln()?.div(&b.ln(prec)?)
}

/// Scans the convergents of `gamma` for the first `q > 6M` with
/// `eps = ||mu q|| - M ||gamma q||` certified positive. The resulting
/// certificate excludes every solution of `0 < m gamma - n + mu < A B^(-e)`
/// with `m <= M` and `e >= ell_bound`.
pub fn dp_reduce(
    gamma: &Ball,
    mu: &Ball,
    m_cap: &BigUint,
    a: &Ball,
    b: &ExpBase,
    max_convergents: usize,
) -> Result<ReductionCertificate> {
    if m_cap.is_zero() {
        return Err(Error::Domain("coefficient cap M must be at least 1".into()));
    }
    if !a.is_positive() {
        return Err(Error::Domain("A must be positive".into()));
    }
    let prec = gamma.prec().max(mu.prec());
    if !b.ln(prec)?.is_positive() {
        return Err(Error::Domain("B must exceed 1".into()));
    }
    let cf = expand_cf_available(gamma, max_convergents);
    let six_m = BigInt::from(m_cap * 6u32);
    let m_ball = Ball::from_int(BigInt::from(m_cap.clone()), prec);
    let mut tried = 0;
    for (i, (_, q)) in cf.convergents.iter().enumerate() {
        if q <= &six_m {
            continue;
        }
        tried += 1;
        let qb = Ball::from_int(q.clone(), prec);
        let eps =
            &(mu * &qb).nearest_int_distance() - &(&m_ball * &(gamma * &qb).nearest_int_distance());
        if eps.is_positive() {
            let q = q.abs().to_biguint().expect("denominators are positive");
            let ell = ell_bound_ball(a, &q, &eps, b, prec)?;
            return Ok(ReductionCertificate {
                k: None,
                m_cap: m_cap.clone(),
                gamma: gamma.clone(),
                mu: mu.clone(),
                q,
                convergent_index: i,
                epsilon: eps,
                a: a.clone(),
                b: b.clone(),
                ell_bound: ell.upper_f64(),
            });
        }
        if eps.contains_zero() && eps.width() > Dyadic::pow2(-8) {
            return Err(Error::indeterminate("epsilon sign", prec));
        }
    }
    if cf.len() >= max_convergents || cf.terminated {
        Err(Error::NoPositiveEpsilon { tried })
    } else {
        Err(Error::PrecisionExhausted {
            what: format!(
                "continued fraction certified only to {} quotients",
                cf.len()
            ),
            bits: prec,
        })
    }
}

/// [`gamma_mu`] followed by [`dp_reduce`] with `A = 7.3` and `B = sqrt 2`.
pub fn reduce_for_k(k: u32, m_cap: &BigUint) -> Result<ReductionCertificate> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    if m_cap.is_zero() {
        return Err(Error::Domain("coefficient cap M must be at least 1".into()));
    }
    let start = 2 * (m_cap.bits() as u32 + 8) + 64;
    ladder(start, |bits| {
        let (gamma, mu) = gamma_mu(k, bits)?;
        let a = Ball::from_ratio(73, 10, bits);
        let mut cert = dp_reduce(
            &gamma,
            &mu,
            m_cap,
            &a,
            &ExpBase::Sqrt2,
            REDUCE_MAX_CONVERGENTS,
        )?;
        cert.k = Some(k);
        Ok(cert)
    })
}

/// The final exponent bound recomputed from the quoted aggregate inputs
/// `A = 7.3`, `q <= 2e1125`, `eps >= 1.5e-5`, in both log bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndgameReport {
    pub a: f64,
    pub q_max: String,
    pub epsilon_min: f64,
    /// `log(A q / eps) / log sqrt 2`.
    pub bound_log_sqrt2: f64,
    /// `log(A q / eps) / log 2`.
    pub bound_log_2: f64,
    pub printed: f64,
    pub conservative: f64,
    pub conservative_base: String,
}

pub fn endgame_discrepancy() -> EndgameReport {
    let p = 256;
    let q_max = BigInt::from(2u32) * BigInt::from(10u32).pow(1125);
    let num = &Ball::from_ratio(73, 10, p) * &Ball::from_int(q_max, p);
    let arg = num
        .div(&Ball::from_ratio(15, 1_000_000, p))
        .expect("nonzero");
    let log_arg = arg.ln().expect("positive");
    let l2 = ln2(p);
    let sqrt2 = log_arg.div(&l2.shl(-1)).expect("nonzero").upper_f64();
    let two = log_arg.div(&l2).expect("nonzero").upper_f64();
    EndgameReport {
        a: 7.3,
        q_max: "2e1125".into(),
        epsilon_min: 1.5e-5,
        bound_log_sqrt2: sqrt2,
        bound_log_2: two,
        printed: 3757.0616,
        conservative: sqrt2.max(two),
        conservative_base: "sqrt2".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(prec: u32) -> Ball {
        let s5 = Ball::from_int(5, prec).sqrt().unwrap();
        (&Ball::one(prec) + &s5).shl(-1)
    }

    #[test]
    fn gamma_mu_values() {
        let (g, m) = gamma_mu(2, 128).unwrap();
        let phi = 1.618_033_988_749_895f64;
        assert!((g.to_f64() - phi.log2()).abs() < 1e-15);
        assert!((g.to_f64() - 0.694_241_913_6).abs() < 1e-10);
        assert!((m.to_f64() - (phi / 5f64.sqrt()).log2()).abs() < 1e-14);
        let (g3, _) = gamma_mu(3, 128).unwrap();
        assert!((g3.to_f64() - 1.839_286_755_214_161f64.log2()).abs() < 1e-14);
        for k in 2..=40 {
            let (g, _) = gamma_mu(k, 96).unwrap();
            assert!(g.is_positive() && g.lt(&Ball::one(96)) == Some(true));
        }
    }

    #[test]
    fn golden_ratio_expansion() {
        let cf = expand_cf(&golden(256), 10).unwrap();
        assert_eq!(cf.len(), 11);
        assert!(cf.quotients.iter().all(|a| a.is_one()));
        let fib = [1u32, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (i, (p, q)) in cf.convergents.iter().enumerate() {
            assert_eq!(q, &BigInt::from(fib[i]));
            assert_eq!(p, &BigInt::from(fib[i + 1]));
        }
        assert_eq!(cf.convergents[10].1, BigInt::from(89));
    }

    #[test]
    fn gamma2_expansion_is_consistent() {
        let (g, _) = gamma_mu(2, 256).unwrap();
        let cf = expand_cf(&g, 20).unwrap();
        for i in 1..cf.len() {
            assert_eq!(cf.determinant(i).abs(), BigInt::one());
            if i >= 2 {
                assert!(cf.convergents[i].1 > cf.convergents[i - 1].1);
            }
        }
    }

    #[test]
    fn rational_expansion_terminates() {
        let half = Ball::exact(Dyadic::pow2(-1), 64);
        let cf = expand_cf(&half, 5).unwrap();
        assert_eq!(cf.quotients, vec![BigInt::zero(), BigInt::from(2)]);
        assert!(cf.terminated);
    }

    #[test]
    fn narrow_ball_limits_expansion() {
        let g = golden(64);
        assert!(matches!(
            expand_cf(&g, 200),
            Err(Error::PrecisionExhausted { .. })
        ));
        assert!(expand_cf_available(&g, 200).len() > 20);
    }

    #[test]
    fn distance_examples() {
        let d = |x: f64| nearest_int_distance(&Ball::from_f64(x, 64));
        assert!(d(3.25).contains(&Dyadic::from_f64(0.25).unwrap()));
        assert!(d(7.5).contains(&Dyadic::pow2(-1)));
        assert!((d(2.999).to_f64() - 0.001).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let (g, m) = gamma_mu(2, 256).unwrap();
        let a = Ball::from_ratio(73, 10, 256);
        let cap = BigUint::from(1_000_000u32);
        let c = dp_reduce(&g, &m, &cap, &a, &ExpBase::Sqrt2, 500).unwrap();
        assert!(c.q > BigUint::from(6_000_000u32));
        assert!(c.epsilon.is_positive());
        assert!(c.ell_bound.is_finite() && c.ell_bound > 0.0);
        c.verify().unwrap();

        assert!(dp_reduce(&g, &m, &BigUint::zero(), &a, &ExpBase::Sqrt2, 500).is_err());
        let c = reduce_for_k(2, &BigUint::one()).unwrap();
        assert!(c.ell_bound > 0.0 && c.q > BigUint::from(6u32));
    }

    #[test]
    fn certificate_json_shape() {
        let c = reduce_for_k(3, &BigUint::from(1000u32)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        for key in [
            "k",
            "M",
            "gamma",
            "mu",
            "q",
            "epsilon",
            "A",
            "B",
            "ell_bound",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["M"], "1000");
        assert!(v["gamma"]["mid"].as_str().unwrap().starts_with("0.879"));
        assert!(v["q"].is_string());
    }

    #[test]
    fn endgame_values() {
        let r = endgame_discrepancy();
        assert!(
            (r.bound_log_sqrt2 - 7514.1).abs() < 0.5,
            "{}",
            r.bound_log_sqrt2
        );
        assert!((r.bound_log_2 - 3757.06).abs() < 0.01, "{}", r.bound_log_2);
        assert_eq!(r.conservative, r.bound_log_sqrt2);
    }
}
