//! Values shared by two or more k-bonacci sequences past their
//! power-of-two prefix, found by a k-way merge over all frontiers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{Num, One};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bigseq::{kbonacci, SequenceWindow};
use crate::error::{Error, Result};

pub const DEFAULT_MEMORY_CAP_BYTES: u64 = 4 << 30;

static MEMORY_CAP: AtomicU64 = AtomicU64::new(DEFAULT_MEMORY_CAP_BYTES);

pub fn memory_cap_bytes() -> u64 {
    MEMORY_CAP.load(Ordering::Relaxed)
}

pub fn set_memory_cap_bytes(bytes: u64) {
    MEMORY_CAP.store(bytes, Ordering::Relaxed);
}

/// Largest `k_max` and `value_bound` the brute-force oracle accepts.
pub const ORACLE_MAX_K: u32 = 16;
pub const ORACLE_MAX_BITS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k_min: u32,
    pub k_max: u32,
    /// Terms above this value are not explored.
    #[serde(with = "decimal")]
    pub value_bound: BigUint,
    /// Heap pops between checkpoints; 0 disables them.
    pub checkpoint_every: u64,
}

impl SearchConfig {
    pub fn new(k_min: u32, k_max: u32, value_bound: BigUint) -> Result<Self> {
        let cfg = SearchConfig {
            k_min,
            k_max,
            value_bound,
            checkpoint_every: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration with `value_bound = 2^bits`.
    pub fn with_bits(k_min: u32, k_max: u32, bits: u64) -> Result<Self> {
        Self::new(k_min, k_max, BigUint::one() << bits)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(Error::Domain(format!(
                "need 2 <= k_min <= k_max, got {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.value_bound < BigUint::from(3u32) {
            return Err(Error::Domain("value bound must be at least 3".into()));
        }
        Ok(())
    }

    /// Bytes needed for every window at the bound's size.
    pub fn projected_memory(&self) -> u64 {
        let term_bytes = self.value_bound.bits().div_ceil(8) + 32;
        (self.k_min as u64..=self.k_max as u64)
            .map(|k| (k + 2) * term_bytes + 64)
            .sum()
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Attainer {
    pub k: u32,
    pub n: i64,
}

/// A value attained by at least two sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceHit {
    #[serde(with = "decimal")]
    pub value: BigUint,
    pub attainers: Vec<Attainer>,
}

impl CoincidenceHit {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("hit serializes")
    }

    /// Recomputes every attainer's term from scratch.
    pub fn verify(&self) -> Result<bool> {
        if self.attainers.len() < 2 {
            return Ok(false);
        }
        for a in &self.attainers {
            if a.n < a.k as i64 + 2 || kbonacci(a.k, a.n)? != self.value {
                return Ok(false);
            }
        }
        Ok(self.attainers.windows(2).all(|w| w[0].k < w[1].k))
    }
}

/// One group of equal heap minima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopGroup {
    pub value: BigUint,
    pub attainers: Vec<Attainer>,
}

/// Resumable merge state.
#[derive(Debug, Clone)]
pub struct SearchState {
    cfg: SearchConfig,
    windows: Vec<SequenceWindow>,
    heap: BinaryHeap<Reverse<(BigUint, u32)>>,
    pops: u64,
    last_value: Option<BigUint>,
    hits: Vec<CoincidenceHit>,
}

impl SearchState {
    pub fn new(cfg: SearchConfig) -> Result<Self> {
        cfg.validate()?;
        let projected = cfg.projected_memory();
        let cap = memory_cap_bytes();
        if projected > cap {
            return Err(Error::ResourceLimit { projected, cap });
        }
        let mut windows = Vec::with_capacity((cfg.k_max - cfg.k_min + 1) as usize);
        for k in cfg.k_min..=cfg.k_max {
            // F_3 .. F_{k+2} = 2, 4, ..., 2^(k-1), 2^k - 1.
            let mut terms: Vec<BigUint> = (1..k).map(|j| BigUint::one() << j).collect();
            terms.push((BigUint::one() << k) - 1u32);
            windows.push(SequenceWindow::from_parts(k, terms, k as i64 + 2)?);
        }
        let mut state = SearchState {
            cfg,
            windows,
            heap: BinaryHeap::new(),
            pops: 0,
            last_value: None,
            hits: Vec::new(),
        };
        state.rebuild_heap();
        Ok(state)
    }

    fn rebuild_heap(&mut self) {
        self.heap = self
            .windows
            .iter()
            .filter(|w| w.newest() <= &self.cfg.value_bound)
            .map(|w| Reverse((w.newest().clone(), w.k())))
            .collect();
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn pops(&self) -> u64 {
        self.pops
    }

    pub fn hits(&self) -> &[CoincidenceHit] {
        &self.hits
    }

    pub fn is_done(&self) -> bool {
        self.heap.is_empty()
    }

    fn window_mut(&mut self, k: u32) -> &mut SequenceWindow {
        &mut self.windows[(k - self.cfg.k_min) as usize]
    }

    /// Pops every frontier equal to the current minimum and advances them.
    pub fn step(&mut self) -> Result<Option<PopGroup>> {
        let Some(Reverse((value, k0))) = self.heap.pop() else {
            return Ok(None);
        };
        if let Some(last) = &self.last_value {
            if &value < last {
                return Err(Error::Invariant(format!(
                    "heap popped {value} after {last}"
                )));
            }
        }
        let mut ks = vec![k0];
        while matches!(self.heap.peek(), Some(Reverse((v, _))) if v == &value) {
            let Reverse((_, k)) = self.heap.pop().expect("peeked");
            ks.push(k);
        }
        let mut attainers = Vec::with_capacity(ks.len());
        for &k in &ks {
            let bound = self.cfg.value_bound.clone();
            let w = self.window_mut(k);
            attainers.push(Attainer { k, n: w.frontier() });
            let next = w.step().clone();
            if next <= value {
                return Err(Error::Invariant(format!(
                    "sequence {k} is not increasing at {}",
                    w.frontier()
                )));
            }
            if next <= bound {
                self.heap.push(Reverse((next, k)));
            }
        }
        self.pops += ks.len() as u64;
        if attainers.len() >= 2 {
            self.hits.push(CoincidenceHit {
                value: value.clone(),
                attainers: attainers.clone(),
            });
        }
        self.last_value = Some(value.clone());
        Ok(Some(PopGroup { value, attainers }))
    }

    /// Runs to completion, handing a checkpoint blob to `sink` every
    /// `checkpoint_every` pops and each new hit to `on_hit`.
    pub fn run(
        &mut self,
        mut on_hit: impl FnMut(&CoincidenceHit),
        mut sink: impl FnMut(&[u8]) -> Result<()>,
    ) -> Result<()> {
        let every = self.cfg.checkpoint_every;
        let mut next_mark = self
            .pops
            .checked_div(every)
            .map_or(u64::MAX, |q| (q + 1) * every);
        while let Some(group) = self.step()? {
            if group.attainers.len() >= 2 {
                on_hit(self.hits.last().expect("just pushed"));
            }
            if self.pops >= next_mark {
                sink(&self.save())?;
                next_mark = (self.pops / every + 1) * every;
            }
        }
        Ok(())
    }

    /// Advances until at least `pops` heap pops have happened.
    pub fn run_until(&mut self, pops: u64) -> Result<()> {
        while self.pops < pops && self.step()?.is_some() {}
        Ok(())
    }

    pub fn save(&self) -> Vec<u8> {
        let snap = Snapshot {
            cfg: self.cfg.clone(),
            windows: self
                .windows
                .iter()
                .map(|w| WindowDoc {
                    k: w.k(),
                    frontier: w.frontier(),
                    terms: w.terms().map(|t| t.to_str_radix(16)).collect(),
                })
                .collect(),
            pops: self.pops,
            last_value: self.last_value.as_ref().map(|v| v.to_str_radix(16)),
            hits: self.hits.clone(),
        };
        let payload = serde_json::to_vec(&snap).expect("snapshot serializes");
        let mut blob = Vec::with_capacity(payload.len() + 52);
        blob.extend_from_slice(CHECKPOINT_MAGIC);
        blob.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        blob.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        blob.extend_from_slice(&payload);
        let digest = Sha256::digest(&blob);
        blob.extend_from_slice(&digest);
        blob
    }

    pub fn load(blob: &[u8]) -> Result<Self> {
        let corrupt = |m: &str| Error::CorruptCheckpoint(m.to_string());
        let header = CHECKPOINT_MAGIC.len() + 12;
        if blob.len() < header + 32 {
            return Err(corrupt("truncated"));
        }
        let (body, digest) = blob.split_at(blob.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(corrupt("integrity hash mismatch"));
        }
        if &body[..CHECKPOINT_MAGIC.len()] != CHECKPOINT_MAGIC {
            return Err(corrupt("bad magic"));
        }
        let at = CHECKPOINT_MAGIC.len();
        let version = u32::from_le_bytes(body[at..at + 4].try_into().expect("4 bytes"));
        if version != CHECKPOINT_VERSION {
            return Err(corrupt(&format!("unsupported version {version}")));
        }
        let len = u64::from_le_bytes(body[at + 4..at + 12].try_into().expect("8 bytes"));
        let payload = &body[header..];
        if payload.len() as u64 != len {
            return Err(corrupt("payload length mismatch"));
        }
        let snap: Snapshot =
            serde_json::from_slice(payload).map_err(|e| corrupt(&e.to_string()))?;
        snap.cfg.validate().map_err(|e| corrupt(&e.to_string()))?;
        let expected = (snap.cfg.k_min..=snap.cfg.k_max).collect::<Vec<_>>();
        if snap.windows.iter().map(|w| w.k).collect::<Vec<_>>() != expected {
            return Err(corrupt("window set does not match the configuration"));
        }
        let hex = |s: &str| BigUint::from_str_radix(s, 16).map_err(|e| corrupt(&e.to_string()));
        let mut windows = Vec::with_capacity(snap.windows.len());
        for w in &snap.windows {
            let terms = w.terms.iter().map(|t| hex(t)).collect::<Result<Vec<_>>>()?;
            windows.push(
                SequenceWindow::from_parts(w.k, terms, w.frontier)
                    .map_err(|e| corrupt(&e.to_string()))?,
            );
        }
        let last_value = snap.last_value.as_deref().map(hex).transpose()?;
        let mut state = SearchState {
            cfg: snap.cfg,
            windows,
            heap: BinaryHeap::new(),
            pops: snap.pops,
            last_value,
            hits: snap.hits,
        };
        state.rebuild_heap();
        Ok(state)
    }
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"KBMMEET\0";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct WindowDoc {
    k: u32,
    frontier: i64,
    terms: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    cfg: SearchConfig,
    windows: Vec<WindowDoc>,
    pops: u64,
    last_value: Option<String>,
    hits: Vec<CoincidenceHit>,
}

/// Every value `<= value_bound` reached by two or more sequences at indices
/// past `k + 1`, sorted by value.
pub fn search(cfg: &SearchConfig) -> Result<Vec<CoincidenceHit>> {
    let mut state = SearchState::new(cfg.clone())?;
    while state.step()?.is_some() {}
    Ok(state.hits)
}

/// Independent check of [`search`]: generates every term in `u128` and
/// joins the lists by value.
pub fn brute_force_oracle(cfg: &SearchConfig) -> Result<Vec<CoincidenceHit>> {
    cfg.validate()?;
    if cfg.k_max > ORACLE_MAX_K || cfg.value_bound > (BigUint::one() << ORACLE_MAX_BITS) {
        return Err(Error::OracleScaleExceeded(format!(
            "oracle handles k <= {ORACLE_MAX_K} and bounds <= 2^{ORACLE_MAX_BITS}"
        )));
    }
    let bound: u128 = u128::try_from(&cfg.value_bound).expect("bound fits u128");
    let mut all: Vec<(u128, u32, i64)> = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        // seq[i] is F_(i - k + 2)
        let mut seq: Vec<u128> = vec![0; k as usize - 1];
        seq.push(1);
        loop {
            let len = seq.len();
            let next: u128 = seq[len - k as usize..].iter().sum();
            let n = len as i64 - k as i64 + 2;
            if next > bound {
                break;
            }
            if n >= k as i64 + 2 {
                all.push((next, k, n));
            }
            seq.push(next);
        }
    }
    all.sort();
    let mut hits = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        if j - i >= 2 {
            hits.push(CoincidenceHit {
                value: BigUint::from(all[i].0),
                attainers: all[i..j]
                    .iter()
                    .map(|&(_, k, n)| Attainer { k, n })
                    .collect(),
            });
        }
        i = j;
    }
    Ok(hits)
}
