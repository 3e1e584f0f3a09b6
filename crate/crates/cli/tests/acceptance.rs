//! Acceptance criteria 1-9, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

use kbm::algnum::{all_roots, scan_growth_and_dresden};
use kbm::linforms::{
    bound_M_of_k, bound_ell_of_k, bound_m_of_ell, check_log_m_absorption, large_k_contradiction,
    replay_ell_chain, replay_m_chain,
};
use kbm::meet::{brute_force_oracle, search, SearchConfig};
use kbm::redux::{dp_reduce, endgame_discrepancy, reduce_for_k, ExpBase};
use kbm::{kbonacci, Ball, Dyadic, Error, LargeKVerdict};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);

fn kbm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kbm"))
        .args(args)
        .output()
        .expect("kbm runs")
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    match (r, limit) {
        (Ok(_), Some(l)) if dt > l => (Err(format!("took {dt:?}, limit {l:?}")), dt),
        (r, _) => (r, dt),
    }
}

fn golden_coincidences() -> Outcome {
    let out = kbm(&[
        "search",
        "--kmin",
        "2",
        "--kmax",
        "30",
        "--bits-bound",
        "200",
    ]);
    let expected = concat!(
        r#"{"value":"13","attainers":[{"k":2,"n":7},{"k":3,"n":6}]}"#,
        "\n",
        r#"{"value":"504","attainers":[{"k":3,"n":12},{"k":7,"n":11}]}"#,
        "\n"
    );
    let got = String::from_utf8_lossy(&out.stdout);
    if out.status.success() && got == expected {
        Ok("exactly 13 and 504".into())
    } else {
        Err(format!("status {:?}, stdout {got:?}", out.status.code()))
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let trials = 128;
    for t in 0..trials {
        let k_max = rng.gen_range(2u32..=12);
        let k_min = rng.gen_range(2..=k_max);
        let bits = rng.gen_range(2u64..=60);
        let bound = (BigUint::one() << bits) - BigUint::from(rng.gen_range(0u32..3));
        let cfg = SearchConfig::new(k_min, k_max, bound.max(BigUint::from(2u32)))
            .map_err(|e| e.to_string())?;
        let a: String = search(&cfg)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|h| h.to_json_line() + "\n")
            .collect();
        let b: String = brute_force_oracle(&cfg)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|h| h.to_json_line() + "\n")
            .collect();
        if a != b {
            return Err(format!("trial {t} {cfg:?}: {a:?} vs {b:?}"));
        }
    }
    Ok(format!("{trials} configs identical"))
}

fn growth_sandwich() -> Outcome {
    let mut cells = 0;
    for k in 2..=30u32 {
        let bad = scan_growth_and_dresden(k, 300).map_err(|e| format!("k={k}: {e}"))?;
        if !bad.is_empty() {
            return Err(format!("k={k}: failing n {bad:?}"));
        }
        cells += 300;
    }
    Ok(format!("{cells} cells certified"))
}

fn dresden_and_binet() -> Outcome {
    // The scan above certifies the Dresden error as well; repeat it here so
    // this criterion stands alone, then check Binet.
    for k in 2..=30u32 {
        let bad = scan_growth_and_dresden(k, 300).map_err(|e| format!("k={k}: {e}"))?;
        if !bad.is_empty() {
            return Err(format!("k={k}: failing n {bad:?}"));
        }
    }
    let tol = Ball::from_ratio(1, 10_000_000_000i64, 256);
    for k in 2..=8u32 {
        let roots = all_roots(k, 256).map_err(|e| e.to_string())?;
        for n in 1..=60i64 {
            let z = roots.binet_sum(n).map_err(|e| e.to_string())?;
            let f = Ball::from_int(
                BigInt::from(kbonacci(k, n).map_err(|e| e.to_string())?),
                256,
            );
            let re = (&z.re - &f).abs();
            let im = z.im.abs();
            if re.lt(&tol) != Some(true) || im.lt(&tol) != Some(true) {
                return Err(format!("Binet k={k} n={n}"));
            }
        }
    }
    Ok("Dresden on k 2..30 x n 1..300, Binet on k 2..8 x n 1..60".into())
}

fn chain_replay() -> Outcome {
    let lim = 10_000u64;
    for ell in 3..=lim {
        let r = replay_m_chain(ell).map_err(|e| format!("ell={ell}: {e}"))?;
        if !r.steps.iter().all(|s| s.holds)
            || !check_log_m_absorption(ell).map_err(|e| e.to_string())?
        {
            return Err(format!("m-chain fails at ell={ell}"));
        }
    }
    for k in 3..=lim {
        let r = replay_ell_chain(k).map_err(|e| format!("k={k}: {e}"))?;
        if !r.steps.iter().all(|s| s.holds) {
            return Err(format!("ell-chain fails at k={k}"));
        }
    }
    let e = |e: Error| e.to_string();
    let spots = [
        (
            "bound_m_of_ell(239) < 8e35",
            bound_m_of_ell(239).map_err(e)?,
            8e35,
        ),
        (
            "bound_m_of_ell(3757) < 9.8e45",
            bound_m_of_ell(3757).map_err(e)?,
            9.8e45,
        ),
        (
            "bound_ell_of_k(1655) < 4e28",
            bound_ell_of_k(1655).map_err(e)?,
            4e28,
        ),
        (
            "bound_M_of_k(1655) < 2e248",
            bound_M_of_k(1655).map_err(e)?,
            2e248,
        ),
    ];
    // The functions return outward-rounded upper ends, so `<` is directional.
    let failed: Vec<String> = spots
        .iter()
        .filter(|(_, v, b)| v >= b)
        .map(|(n, v, _)| format!("{n} is false ({v:.4e})"))
        .collect();
    if failed.is_empty() {
        Ok(format!("grids ell, k in [3, {lim}] and 4 spot values"))
    } else {
        Err(format!(
            "grids ell, k in [3, {lim}] hold; spot values: {}",
            failed.join("; ")
        ))
    }
}

fn reduction_desk_scale() -> Outcome {
    let m60 = BigUint::from(10u32).pow(60);
    let mut worst: f64 = 0.0;
    for k in 2..=25u32 {
        let c = reduce_for_k(k, &m60).map_err(|e| format!("k={k}: {e}"))?;
        c.verify().map_err(|e| format!("k={k}: {e}"))?;
        if !(c.q > &m60 * 6u32 && c.epsilon.is_positive() && c.ell_bound.is_finite()) {
            return Err(format!("k={k}: certificate conditions"));
        }
        worst = worst.max(c.ell_bound);
    }
    let full = BigUint::from(2u32) * BigUint::from(10u32).pow(248);
    let c = reduce_for_k(2, &full).map_err(|e| format!("k=2 full: {e}"))?;
    if !(c.q > &full * 6u32 && c.epsilon.is_positive() && c.ell_bound.is_finite()) {
        return Err("k=2 at 2e248: certificate conditions".into());
    }
    let certified = synthetic_oracle()?;
    Ok(format!(
        "k 2..25 at 1e60 (max ell {worst:.2}), k=2 at 2e248 (ell {:.2}), {certified} synthetic instances",
        c.ell_bound
    ))
}

/// dp_reduce against exhaustive enumeration of every m <= M.
fn synthetic_oracle() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd);
    let prec = 256;
    let rand_dyadic = |rng: &mut ChaCha8Rng, signed: bool| {
        let mut m = BigInt::from(rng.gen::<u128>() >> 8);
        if signed && rng.gen_bool(0.5) {
            m = -m;
        }
        Ball::exact(Dyadic::new(m, -120), prec)
    };
    let mut certified = 0;
    for trial in 0..40 {
        let gamma = rand_dyadic(&mut rng, false);
        let mu = rand_dyadic(&mut rng, true);
        let m_cap = rng.gen_range(1u32..=1000);
        let a = Ball::from_ratio(rng.gen_range(10i64..=100), 10, prec);
        let cert = match dp_reduce(&gamma, &mu, &BigUint::from(m_cap), &a, &ExpBase::Sqrt2, 200) {
            Ok(c) => c,
            Err(Error::NoPositiveEpsilon { .. }) => continue,
            Err(e) => return Err(format!("trial {trial}: {e}")),
        };
        let e0 = cert.ell_threshold();
        let mut thr = a.shl(-((e0 / 2) as i64));
        if e0 % 2 == 1 {
            thr = thr.div(&Ball::from_int(2, prec).sqrt().unwrap()).unwrap();
        }
        for m in 1..=m_cap {
            let x = &(&gamma * &Ball::from_int(m, prec)) + &mu;
            let n = x.floor().ok_or("exact inputs")?;
            let v = &x - &Ball::from_int(n, prec);
            if !v.contains_zero() && thr.le(&v) != Some(true) {
                return Err(format!("trial {trial}: m={m} not excluded"));
            }
        }
        certified += 1;
    }
    if certified < 25 {
        return Err(format!("only {certified} synthetic instances certified"));
    }
    Ok(certified)
}

fn large_k() -> Outcome {
    for k in 2..=5000u64 {
        let w = large_k_contradiction(k).map_err(|e| e.to_string())?;
        let want = if k >= 9 {
            LargeKVerdict::Contradiction
        } else {
            LargeKVerdict::Inconclusive
        };
        if w.verdict != want {
            return Err(format!("k={k}: {:?}", w.verdict));
        }
    }
    Ok("contradiction for k 9..5000, inconclusive for k 2..8".into())
}

fn sig4(x: f64) -> f64 {
    let s = 10f64.powi(3 - x.abs().log10().floor() as i32);
    (x * s).round() / s
}

fn endgame_report() -> Outcome {
    let r = endgame_discrepancy();
    let (a, b) = (sig4(r.bound_log_sqrt2), sig4(r.bound_log_2));
    if a != 7514.0
        || b != 3757.0
        || r.conservative != r.bound_log_sqrt2
        || r.conservative_base != "sqrt2"
    {
        return Err(format!("{r:?}"));
    }
    let out = kbm(&["certify", "--kmax", "2", "--search-bits", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    if v["endgame"]["conservative_base"] != "sqrt2" {
        return Err("certificate lacks the endgame report".into());
    }
    Ok(format!("log sqrt2: {a}, log 2: {b}, conservative sqrt2"))
}

fn long_run_gate() -> Outcome {
    let cases: [&[&str]; 3] = [
        &["search", "--full-scale"],
        &["search", "--kmax", "4999", "--bits-bound", "5000"],
        &["certify", "--full-scale"],
    ];
    for args in cases {
        let out = kbm(args);
        let err: serde_json::Value =
            serde_json::from_slice(&out.stderr).map_err(|e| e.to_string())?;
        if out.status.code() != Some(2)
            || err["error"]["kind"] != "domain"
            || !out.stdout.is_empty()
        {
            return Err(format!("{args:?} was not refused"));
        }
    }
    Ok("full-scale range refused without --long-run".into())
}

fn main() {
    let crit: Vec<Criterion> = vec![
        (
            1,
            "golden coincidences",
            Some(Duration::from_secs(300)),
            golden_coincidences,
        ),
        (
            2,
            "oracle equivalence",
            Some(Duration::from_secs(120)),
            oracle_equivalence,
        ),
        (3, "growth sandwich", None, growth_sandwich),
        (4, "Dresden error and Binet", None, dresden_and_binet),
        (5, "constant-chain replay", None, chain_replay),
        (6, "reduction at desk scale", None, reduction_desk_scale),
        (7, "large-k case", None, large_k),
        (8, "discrepancy report", None, endgame_report),
        (9, "long-run gate", None, long_run_gate),
    ];
    let mut failed = 0;
    for (n, name, limit, f) in crit {
        let (r, dt) = timed(limit, f);
        match r {
            Ok(m) => println!(
                "criterion {n} ({name}): PASS  {m}  [{:.2}s]",
                dt.as_secs_f64()
            ),
            Err(m) => {
                failed += 1;
                println!(
                    "criterion {n} ({name}): FAIL  {m}  [{:.2}s]",
                    dt.as_secs_f64()
                );
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
