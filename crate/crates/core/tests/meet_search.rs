use kbm::meet::{brute_force_oracle, search, Attainer, SearchConfig, SearchState};
use kbm::{CoincidenceHit, Error};
use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lines(hits: &[CoincidenceHit]) -> String {
    hits.iter().map(|h| h.to_json_line() + "\n").collect()
}

fn golden() -> Vec<CoincidenceHit> {
    let mk = |v: u32, a: [(u32, i64); 2]| CoincidenceHit {
        value: BigUint::from(v),
        attainers: a.iter().map(|&(k, n)| Attainer { k, n }).collect(),
    };
    vec![mk(13, [(2, 7), (3, 6)]), mk(504, [(3, 12), (7, 11)])]
}

#[test]
fn two_coincidences_up_to_2_pow_200() {
    let cfg = SearchConfig::with_bits(2, 30, 200).unwrap();
    let hits = search(&cfg).unwrap();
    assert_eq!(hits, golden());
    for h in &hits {
        assert!(h.verify().unwrap());
    }
}

#[test]
fn hits_respect_index_ordering() {
    // For F_m^(k) = F_n^(l) with l > k past both prefixes: m > n and 2n > m.
    let cfg = SearchConfig::with_bits(2, 40, 256).unwrap();
    for h in search(&cfg).unwrap() {
        for (i, small) in h.attainers.iter().enumerate() {
            for large in &h.attainers[i + 1..] {
                assert!(small.k < large.k);
                assert!(small.n > large.n && 2 * large.n > small.n, "{h:?}");
            }
        }
    }
}

#[test]
fn search_matches_oracle_on_random_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..120 {
        let k_max = rng.gen_range(2u32..=12);
        let k_min = rng.gen_range(2..=k_max);
        let bits = rng.gen_range(2u64..=60);
        let bound = (BigUint::one() << bits) - BigUint::from(rng.gen_range(0u32..2));
        let bound = bound.max(BigUint::from(3u32));
        let cfg = SearchConfig::new(k_min, k_max, bound).unwrap();
        let a = lines(&search(&cfg).unwrap());
        let b = lines(&brute_force_oracle(&cfg).unwrap());
        assert_eq!(a, b, "trial {trial}: {cfg:?}");
    }
}

#[test]
fn pops_are_nondecreasing_and_exclude_prefix() {
    let cfg = SearchConfig::with_bits(2, 25, 120).unwrap();
    let mut state = SearchState::new(cfg).unwrap();
    let mut last = BigUint::from(0u32);
    while let Some(g) = state.step().unwrap() {
        assert!(g.value >= last);
        last = g.value.clone();
        for a in &g.attainers {
            assert!(a.n >= a.k as i64 + 2);
        }
        if g.attainers.len() >= 2 {
            // Never a power of two: those only occur inside the prefixes.
            assert!(g.value.count_ones() > 1);
        }
    }
    assert_eq!(state.hits(), golden().as_slice());
}

#[test]
fn checkpoint_resume_is_identical() {
    let mut cfg = SearchConfig::with_bits(2, 50, 300).unwrap();
    cfg.checkpoint_every = 0;
    let full = search(&cfg).unwrap();

    let mut state = SearchState::new(cfg.clone()).unwrap();
    state.run_until(10_000).unwrap();
    assert!(!state.is_done());
    let blob = state.save();
    let mut resumed = SearchState::load(&blob).unwrap();
    assert_eq!(resumed.pops(), state.pops());
    resumed.run(|_| {}, |_| Ok(())).unwrap();
    assert_eq!(lines(resumed.hits()), lines(&full));

    let fresh = SearchState::new(cfg).unwrap();
    let mut again = SearchState::load(&fresh.save()).unwrap();
    again.run(|_| {}, |_| Ok(())).unwrap();
    assert_eq!(again.hits(), full.as_slice());
}

#[test]
fn periodic_checkpoints_resume_from_any_point() {
    let mut cfg = SearchConfig::with_bits(2, 12, 64).unwrap();
    cfg.checkpoint_every = 97;
    let full = search(&cfg).unwrap();
    let mut blobs = Vec::new();
    let mut state = SearchState::new(cfg).unwrap();
    state
        .run(
            |_| {},
            |b| {
                blobs.push(b.to_vec());
                Ok(())
            },
        )
        .unwrap();
    assert!(blobs.len() > 3);
    for b in blobs.iter().step_by(3) {
        let mut s = SearchState::load(b).unwrap();
        s.run(|_| {}, |_| Ok(())).unwrap();
        assert_eq!(s.hits(), full.as_slice());
    }
}

#[test]
fn tampered_checkpoint_is_rejected() {
    let cfg = SearchConfig::with_bits(2, 10, 40).unwrap();
    let mut state = SearchState::new(cfg).unwrap();
    state.run_until(50).unwrap();
    let blob = state.save();
    for pos in [0, 9, 20, blob.len() / 2, blob.len() - 1] {
        let mut bad = blob.clone();
        bad[pos] ^= 0x01;
        assert!(
            matches!(SearchState::load(&bad), Err(Error::CorruptCheckpoint(_))),
            "pos {pos}"
        );
    }
    assert!(matches!(
        SearchState::load(&blob[..30]),
        Err(Error::CorruptCheckpoint(_))
    ));
    assert!(SearchState::load(&blob).is_ok());
}
