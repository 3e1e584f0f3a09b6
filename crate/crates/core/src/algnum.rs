//! Certified real and complex enclosures for the characteristic polynomial
//! `psi_k(x) = x^k - x^(k-1) - ... - x - 1`, its roots, the weight
//! `g(x, y) = (x - 1) / (2 + (y + 1)(x - 2))`, and the dominant-term
//! estimate `g(alpha, k) * alpha^(n-1)` of `F_n^(k)`.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::ball::{Ball, ComplexBall, Dyadic};
use crate::bigseq::kbonacci;
use crate::error::{Error, Result};
use crate::precision::{certify, ladder, precision_cap};

/// Largest `k` accepted by [`all_roots`].
pub const ALL_ROOTS_MAX_K: u32 = 64;

const BISECTION_STEPS: u32 = 64;

/// Enclosure of the unique root of `psi_k` outside the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantRoot {
    pub k: u32,
    pub value: Ball,
}

/// Certified enclosures of all `k` roots of `psi_k`; `roots[0]` is the
/// dominant one.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub k: u32,
    pub roots: Vec<ComplexBall>,
}

/// `psi_k(x)` and `psi_k'(x)` by Horner's rule on the coefficient list.
pub fn psi_with_derivative(x: &Ball, k: u32) -> (Ball, Ball) {
    let prec = x.prec();
    let one = Ball::one(prec);
    let mut p = Ball::one(prec);
    let mut d = Ball::zero(prec);
    for _ in 0..k {
        d = &(&d * x) + &p;
        p = &(&p * x) - &one;
    }
    (p, d)
}

fn complex_psi_with_derivative(z: &ComplexBall, k: u32) -> (ComplexBall, ComplexBall) {
    let prec = z.re.prec();
    let one = ComplexBall::one(prec);
    let mut p = ComplexBall::one(prec);
    let mut d = ComplexBall::real(Ball::zero(prec));
    for _ in 0..k {
        d = &(&d * z) + &p;
        p = &(&p * z) - &one;
    }
    (p, d)
}

/// Exact sign of `psi_k(m / 2^e)`.
fn psi_sign_exact(m: &BigInt, e: u64, k: u32) -> std::cmp::Ordering {
    // Horner on psi_k(x) * 2^(e k) with x = m / 2^e.
    let mut acc = BigInt::one();
    for j in 1..=k as u64 {
        acc = acc * m - (BigInt::one() << (e * j));
    }
    acc.cmp(&BigInt::zero())
}

/// Lower end `2(1 - 2^-k)` of the root bracket.
pub fn root_bracket_lower(k: u32) -> Dyadic {
    Dyadic::from_int(2).sub(&Dyadic::pow2(1 - k as i64))
}

/// Certified dominant root with width at most `2^-(precision_bits - 4)`.
pub fn dominant_root(k: u32, precision_bits: u32) -> Result<DominantRoot> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    if precision_bits < 64 {
        return Err(Error::Domain("precision must be at least 64 bits".into()));
    }
    let bracket_lo = root_bracket_lower(k);
    let two = Dyadic::from_int(2);

    // Exact bisection on a 2^-e grid inside (2(1 - 2^-k), 2).
    let e = k as u64 + BISECTION_STEPS as u64 + 2;
    let mut lo = bracket_lo.mantissa() << (e as i64 + bracket_lo.exponent()) as u64;
    let mut hi = BigInt::from(2) << e;
    if psi_sign_exact(&lo, e, k) != std::cmp::Ordering::Less
        || psi_sign_exact(&hi, e, k) != std::cmp::Ordering::Greater
    {
        return Err(Error::Invariant(format!(
            "psi_{k} has no sign change on its bracket"
        )));
    }
    for _ in 0..BISECTION_STEPS {
        let mid: BigInt = (&lo + &hi) >> 1u32;
        match psi_sign_exact(&mid, e, k) {
            std::cmp::Ordering::Less => lo = mid,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => {
                return Err(Error::Invariant(format!("psi_{k} has a dyadic root")));
            }
        }
    }
    let mut work = 128 + 2 * k.ilog2();
    let mut x = Ball::from_interval(
        &Dyadic::new(lo, -(e as i64)),
        &Dyadic::new(hi, -(e as i64)),
        work,
    );

    let target_rad = Dyadic::pow2(-(precision_bits as i64) + 3);
    let cap = precision_cap().max(precision_bits + 64);
    let guard = 32 + 2 * k.ilog2();
    while x.rad() > &target_rad {
        let c = Ball::exact(x.mid().clone(), work);
        let (fc, _) = psi_with_derivative(&c, k);
        let (_, dx) = psi_with_derivative(&x.with_prec(work), k);
        let step = fc.div(&dx)?;
        let newton = &c - &step;
        let next = newton
            .intersect(&x)
            .ok_or_else(|| Error::Invariant("interval Newton lost the root".into()))?;
        let shrunk = next.rad() < &x.rad().shl(-1);
        x = next;
        // Working precision tracks roughly twice the bits already correct.
        let correct = (-x.rad().ilog2()).max(0) as u32;
        let wanted = (2 * correct + guard).min(precision_bits + guard);
        if wanted > work {
            work = wanted;
        } else if !shrunk {
            if work >= cap {
                return Err(Error::PrecisionExhausted {
                    what: format!("dominant root of psi_{k}"),
                    bits: work,
                });
            }
            work = (work * 2).min(cap);
        }
    }
    let value = x.with_prec(precision_bits.max(x.prec()));
    if value.lower() <= bracket_lo || value.upper() >= two {
        return Err(Error::Invariant(format!(
            "dominant root of psi_{k} left its bracket"
        )));
    }
    Ok(DominantRoot { k, value })
}

/// `g(x, y) = (x - 1) / (2 + (y + 1)(x - 2))`.
pub fn weight_g(x: &Ball, y: u64) -> Result<Ball> {
    let prec = x.prec();
    let den = &Ball::from_int(2, prec)
        + &(&Ball::from_int(y + 1, prec) * &(x - &Ball::from_int(2, prec)));
    (x - &Ball::one(prec)).div(&den)
}

fn weight_g_complex(z: &ComplexBall, k: u32) -> Result<ComplexBall> {
    let prec = z.re.prec();
    let two = ComplexBall::real(Ball::from_int(2, prec));
    let den =
        &two + &(&z.scale(&Ball::from_int(k + 1, prec)) - &two.scale(&Ball::from_int(k + 1, prec)));
    (z - &ComplexBall::one(prec)).div(&den)
}

/// `g(alpha, k) * alpha^(n-1)` for the dominant root of `psi_k`.
pub fn dresden_estimate(k: u32, n: i64, precision_bits: u32) -> Result<Ball> {
    if n < 1 {
        return Err(Error::IndexBelowRange { k, n, min: 1 });
    }
    let root = dominant_root(k, precision_bits + 16)?;
    dresden_from_root(&root, n)
}

fn dresden_from_root(root: &DominantRoot, n: i64) -> Result<Ball> {
    let alpha = &root.value;
    Ok(&weight_g(alpha, root.k as u64)? * &alpha.pow_u((n - 1) as u64))
}

fn working_bits(n: i64) -> u32 {
    128 + (n.max(1) as u32).saturating_mul(2)
}

/// Certifies `|F_n^(k) - g(alpha, k) alpha^(n-1)| < 1/2`.
pub fn check_dresden_error(k: u32, n: i64) -> Result<bool> {
    let exact = kbonacci(k, n)?;
    ladder(working_bits(n), |bits| {
        let root = dominant_root(k, bits)?;
        dresden_error_holds(&root, n, &exact, bits)
    })
}

fn dresden_error_holds(root: &DominantRoot, n: i64, exact: &BigUint, bits: u32) -> Result<bool> {
    let est = dresden_from_root(root, n)?;
    let err = (&est - &Ball::from_int(BigInt::from(exact.clone()), bits)).abs();
    certify(
        err.lt(&Ball::from_f64(0.5, bits)),
        "Dresden error below 1/2",
        bits,
    )
}

/// Certifies `alpha^(n-2) <= F_n^(k) <= alpha^(n-1)`.
pub fn check_growth_bounds(k: u32, n: i64) -> Result<bool> {
    if n < 1 {
        return Err(Error::IndexBelowRange { k, n, min: 1 });
    }
    let exact = kbonacci(k, n)?;
    ladder(working_bits(n), |bits| {
        let root = dominant_root(k, bits)?;
        growth_holds(&root, n, &exact, bits)
    })
}

fn growth_holds(root: &DominantRoot, n: i64, exact: &BigUint, bits: u32) -> Result<bool> {
    let f = Ball::from_int(BigInt::from(exact.clone()), bits);
    let lower = root.value.pow_i(n - 2)?;
    let upper = root.value.pow_u((n - 1) as u64);
    let below = certify(lower.le(&f), "alpha^(n-2) <= F_n", bits)?;
    let above = certify(f.le(&upper), "F_n <= alpha^(n-1)", bits)?;
    Ok(below && above)
}

/// Batch form of [`check_growth_bounds`] and [`check_dresden_error`] over
/// `n in 1..=n_max`, sharing one root enclosure. Returns the indices that
/// fail either certificate.
pub fn scan_growth_and_dresden(k: u32, n_max: i64) -> Result<Vec<i64>> {
    let exact: Vec<BigUint> = crate::bigseq::terms_from(k, 1)?
        .take(n_max.max(0) as usize)
        .collect();
    ladder(working_bits(n_max), |bits| {
        let root = dominant_root(k, bits)?;
        let mut failures = Vec::new();
        for (i, f) in exact.iter().enumerate() {
            let n = i as i64 + 1;
            let ok = growth_holds(&root, n, f, bits)? && dresden_error_holds(&root, n, f, bits)?;
            if !ok {
                failures.push(n);
            }
        }
        Ok(failures)
    })
}

/// Upper bound `log(k + 1) + log 4` on the height of `g(alpha, k)`.
pub fn height_bound_g(k: u32) -> f64 {
    height_bound_g_ball(k, 128).upper_f64()
}

pub fn height_bound_g_ball(k: u32, prec: u32) -> Ball {
    Ball::from_int(4 * (k as u64 + 1), prec)
        .ln()
        .expect("positive argument")
}

fn aberth_f64(k: u32) -> Vec<Complex64> {
    let n = k as usize;
    let eval = |z: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for _ in 0..k {
            d = d * z + p;
            p = p * z - 1.0;
        }
        (p, d)
    };
    let mut zs: Vec<Complex64> = (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.4;
            Complex64::from_polar(1.3, theta)
        })
        .collect();
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, d) = eval(zs[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / d;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (zs[i] - zs[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            zs[i] -= w;
            max_step = max_step.max(w.norm());
        }
        if max_step < 1e-15 {
            break;
        }
    }
    zs
}

/// All roots of `psi_k` as pairwise disjoint certified boxes, `k <= 64`.
pub fn all_roots(k: u32, precision_bits: u32) -> Result<RootSet> {
    if !(2..=ALL_ROOTS_MAX_K).contains(&k) {
        return Err(Error::Domain(format!(
            "all_roots supports 2 <= k <= {ALL_ROOTS_MAX_K}, got {k}"
        )));
    }
    ladder(precision_bits.max(64), |bits| {
        certified_roots(k, bits, precision_bits)
    })
}

fn certified_roots(k: u32, bits: u32, out_prec: u32) -> Result<RootSet> {
    let work = bits + 32;
    let mut zs: Vec<ComplexBall> = aberth_f64(k)
        .into_iter()
        .map(|z| ComplexBall::from_f64(z.re, z.im, work))
        .collect();
    // Newton polishing on midpoints; each pass roughly doubles correct bits.
    let passes = (work / 40).max(1).ilog2() + 3;
    for _ in 0..passes {
        for z in zs.iter_mut() {
            let (p, d) = complex_psi_with_derivative(z, k);
            let step = p.div(&d)?;
            let next = &*z - &step;
            *z = ComplexBall::new(
                Ball::exact(next.re.mid().clone(), work),
                Ball::exact(next.im.mid().clone(), work),
            );
        }
    }
    // Inclusion radii k |psi(z_i)| / prod |z_i - z_j|.
    let n = zs.len();
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let (p, _) = complex_psi_with_derivative(&zs[i], k);
        let num = p.abs()?.upper();
        let mut den = Ball::one(work);
        for j in 0..n {
            if j != i {
                den = &den * &(&zs[i] - &zs[j]).abs()?;
            }
        }
        let den_lo = den.lower();
        if !den_lo.is_positive() {
            return Err(Error::indeterminate(
                "root approximations are not separated",
                bits,
            ));
        }
        let r = num.mul(&Dyadic::from_int(k)).div_up(&den_lo, 64);
        radii.push(r);
    }
    for i in 0..n {
        for j in i + 1..n {
            let dist = (&zs[i] - &zs[j]).abs()?.lower();
            if dist <= radii[i].add(&radii[j]).shl(1) {
                return Err(Error::indeterminate("root disks overlap", bits));
            }
        }
    }
    let mut roots: Vec<ComplexBall> = zs
        .iter()
        .zip(&radii)
        .map(|(z, r)| ComplexBall::disk(z.re.mid(), z.im.mid(), r, out_prec.max(bits)))
        .collect();
    // Dominant root first, the rest ordered by argument.
    roots.sort_by(|a, b| {
        let (ar, ai) = a.mid_f64();
        let (br, bi) = b.mid_f64();
        let ka = (-(ar * ar + ai * ai), ai.atan2(ar));
        let kb = (-(br * br + bi * bi), bi.atan2(br));
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    let set = RootSet { k, roots };
    let outside = set.count_modulus_above_one(bits)?;
    if outside != 1 {
        return Err(Error::Invariant(format!(
            "psi_{k} has {outside} roots outside the unit circle"
        )));
    }
    Ok(set)
}

impl RootSet {
    /// Number of roots certified to have modulus > 1 (every root must be
    /// certified on one side of the unit circle).
    pub fn count_modulus_above_one(&self, bits: u32) -> Result<usize> {
        let one = Ball::one(bits);
        let mut count = 0;
        for z in &self.roots {
            let m = z.abs()?;
            match (m.gt(&one), m.lt(&one)) {
                (Some(true), _) => count += 1,
                (_, Some(true)) => {}
                _ => return Err(Error::indeterminate("root modulus vs 1", bits)),
            }
        }
        Ok(count)
    }

    /// `sum_i g(alpha_i, k) alpha_i^(n-1)` over all roots.
    pub fn binet_sum(&self, n: i64) -> Result<ComplexBall> {
        if n < 1 {
            return Err(Error::IndexBelowRange {
                k: self.k,
                n,
                min: 1,
            });
        }
        let prec = self.roots[0].re.prec();
        let mut acc = ComplexBall::real(Ball::zero(prec));
        for z in &self.roots {
            let term = &weight_g_complex(z, self.k)? * &z.pow_u((n - 1) as u64);
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// `|g(alpha_i, k)|` for every non-dominant root.
    pub fn conjugate_weights(&self) -> Result<Vec<Ball>> {
        self.roots[1..]
            .iter()
            .map(|z| weight_g_complex(z, self.k)?.abs())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn near(b: &Ball, v: f64, tol: f64) -> bool {
        (b.to_f64() - v).abs() < tol
    }

    #[test]
    fn golden_ratio() {
        let r = dominant_root(2, 256).unwrap();
        // (1 + sqrt 5) / 2 as an independent ball.
        let phi = (&Ball::one(300) + &Ball::from_int(5, 300).sqrt().unwrap()).shl(-1);
        assert!(r.value.intersect(&phi).is_some());
        assert!(r.value.width() <= Dyadic::pow2(-252));
    }

    #[test]
    fn tribonacci_constant() {
        // Independent Newton iteration in f64 on x^3 - x^2 - x - 1 from 1.9.
        let mut x = 1.9f64;
        for _ in 0..60 {
            x -= (x * x * x - x * x - x - 1.0) / (3.0 * x * x - 2.0 * x - 1.0);
        }
        let r = dominant_root(3, 128).unwrap();
        assert!(near(&r.value, x, 1e-15));
        assert!(near(&r.value, 1.839_286_755_2, 1e-10));
    }

    #[test]
    fn roots_in_bracket_and_increasing() {
        let mut prev: Option<Ball> = None;
        for k in 2..=100u32 {
            let r = dominant_root(k, 96).unwrap();
            assert!(r.value.lower() > root_bracket_lower(k));
            assert!(r.value.upper() < Dyadic::from_int(2));
            let (psi, _) = psi_with_derivative(&r.value, k);
            assert!(psi.contains_zero());
            if let Some(p) = prev {
                assert_eq!(p.lt(&r.value), Some(true), "k={k}");
            }
            prev = Some(r.value);
        }
    }

    #[test]
    fn high_precision_root_is_narrow() {
        let r = dominant_root(7, 4096).unwrap();
        assert!(r.value.width() <= Dyadic::pow2(-4092));
    }

    #[test]
    fn weight_examples() {
        let phi = dominant_root(2, 200).unwrap().value;
        let g = weight_g(&phi, 2).unwrap();
        // phi / sqrt 5
        let s5 = Ball::from_int(5, 200).sqrt().unwrap();
        let expected = phi.div(&s5).unwrap();
        assert!(g.intersect(&expected).is_some());
        assert!(near(&g, 0.723_606_797_7, 1e-10));

        let at_two = weight_g(&Ball::from_int(2, 64), 17).unwrap();
        assert!(at_two.contains(&Dyadic::pow2(-1)) && at_two.is_exact());

        for k in 2..=30u32 {
            let a = dominant_root(k, 128).unwrap().value;
            let g = weight_g(&a, k as u64).unwrap();
            assert_eq!(g.gt(&Ball::from_f64(0.25, 128)), Some(true));
            assert_eq!(g.lt(&Ball::from_int(2, 128)), Some(true));
        }
    }

    #[test]
    fn weight_with_ambiguous_denominator() {
        // 2 + 3 (x - 2) = 0  at x = 4/3.
        let x = Ball::new(Dyadic::from_f64(4.0 / 3.0).unwrap(), Dyadic::pow2(-20), 64);
        assert_eq!(weight_g(&x, 2), Err(Error::DivisionByAmbiguousZero));
    }

    #[test]
    fn dresden_examples() {
        let e = dresden_estimate(2, 10, 128).unwrap();
        let oracle = 0.723_606_797_749_979 * 1.618_033_988_749_895f64.powi(9);
        assert!(near(&e, oracle, 1e-9));
        assert!(near(&e, 55.0036, 1e-4));
        assert!(check_dresden_error(2, 10).unwrap());
        assert!(check_dresden_error(3, 12).unwrap());
        let e = dresden_estimate(3, 12, 128).unwrap();
        assert!((e.to_f64() - 504.0).abs() < 0.5);
        assert!(check_dresden_error(2, 1).unwrap());
        assert!(dresden_estimate(2, 0, 64).is_err());
    }

    #[test]
    fn growth_examples() {
        assert!(check_growth_bounds(2, 7).unwrap());
        assert!(check_growth_bounds(3, 1).unwrap());
        assert!(check_growth_bounds(30, 31).unwrap());
        assert!(check_growth_bounds(2, 0).is_err());
    }

    #[test]
    fn height_bound_examples() {
        assert!((height_bound_g(2) - 12f64.ln()).abs() < 1e-12);
        assert!((height_bound_g(3) - 16f64.ln()).abs() < 1e-12);
        assert!(height_bound_g(2) >= 12f64.ln());
        for k in 2..200 {
            assert!(height_bound_g(k) < height_bound_g(k + 1));
        }
    }

    #[test]
    fn quadratic_roots() {
        let set = all_roots(2, 128).map_err(|e| format!("{e:?}")).unwrap();
        let (r0, _) = set.roots[0].mid_f64();
        let (r1, i1) = set.roots[1].mid_f64();
        assert!((r0 - 1.618_033_988_749_895).abs() < 1e-14);
        assert!((r1 + 0.618_033_988_749_895).abs() < 1e-14 && i1.abs() < 1e-14);
    }

    #[test]
    fn cubic_roots() {
        let set = all_roots(3, 128).unwrap();
        assert!((set.roots[0].mid_f64().0 - 1.839_286_755_2).abs() < 1e-9);
        let (a, b) = (set.roots[1].mid_f64(), set.roots[2].mid_f64());
        assert!((a.0 - b.0).abs() < 1e-14 && (a.1 + b.1).abs() < 1e-14);
        assert!(a.1.abs() > 0.1);
        for z in &set.roots[1..] {
            assert_eq!(z.abs().unwrap().lt(&Ball::one(128)), Some(true));
        }
    }

    #[test]
    fn all_roots_rejects_large_k() {
        assert!(all_roots(65, 128).is_err());
        assert!(all_roots(1, 128).is_err());
    }
}
