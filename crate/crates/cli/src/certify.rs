use kbm::linforms::{bound_m_of_ell, cap_m_of_k, large_k_contradiction};
use kbm::meet::{search, SearchConfig};
use kbm::redux::{endgame_discrepancy, reduce_for_k, CertificateDoc, EndgameReport};
use kbm::{CoincidenceHit, LargeKWitness, Result};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

/// Largest `k` and value bit length accepted without `--long-run`.
pub const DESK_MAX_K: u32 = 512;
pub const DESK_MAX_BITS: u64 = 1024;

/// The coincidences every search over a big enough region must return.
pub const KNOWN_HITS: [u32; 2] = [13, 504];

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub k_max: u32,
    /// Value bound `2^search_bits` for the replay search; 0 skips it.
    pub search_bits: u64,
    /// Reduction cap per k is `min(M_k, m_cap)`; `None` uses `M_k`.
    pub m_cap: Option<BigUint>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ReplayedAtScale,
    BoundOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerK {
    pub k: u32,
    #[serde(rename = "M_k")]
    pub m_k: String,
    /// The cap the reduction actually used.
    pub m_used: Option<String>,
    pub full_cap: bool,
    pub method: &'static str,
    pub reduction: Option<CertificateDoc>,
    pub large_k: LargeKWitness,
    pub ell_bound: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub k_min: u32,
    pub k_max: u32,
    pub value_bits: u64,
    pub hits: Vec<CoincidenceHit>,
    pub known_hits: Vec<String>,
    pub unknown_hits: Vec<String>,
    /// True when every known hit below the bound was found and nothing else.
    pub exactly_known: bool,
    /// True only if `2^value_bits` reaches past every term index allowed by
    /// `combined_m_bound`, which no desk-scale run does. The verdict needs
    /// only the k-range to cover `combined_ell_bound`.
    pub covers_bounds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub k_range: [u32; 2],
    pub per_k: Vec<PerK>,
    pub inconclusive: Vec<u32>,
    pub combined_ell_bound: Option<f64>,
    pub combined_m_bound: Option<f64>,
    pub all_full_cap: bool,
    pub search_performed: Option<SearchConfig>,
    pub search: Option<SearchSummary>,
    pub verdict: Verdict,
    pub endgame: EndgameReport,
}

impl CertifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// One per-k entry: the large-k witness if it closes the case, else a
/// reduction at `min(M_k, desk)`.
pub fn certify_k(k: u32, desk: Option<&BigUint>) -> Result<PerK> {
    let m_k = cap_m_of_k(k as u64)?;
    let large = large_k_contradiction(k as u64)?;
    let mut entry = PerK {
        k,
        m_k: m_k.to_string(),
        m_used: None,
        full_cap: true,
        method: "large-k",
        reduction: None,
        large_k: large.clone(),
        ell_bound: None,
        error: None,
    };
    if large.closes_case() {
        return Ok(entry);
    }
    let used = match desk {
        Some(d) if d < &m_k => d.clone(),
        _ => m_k.clone(),
    };
    entry.full_cap = used == m_k;
    entry.m_used = Some(used.to_string());
    entry.method = "reduction";
    match reduce_for_k(k, &used) {
        Ok(cert) => {
            entry.ell_bound = Some(cert.ell_bound);
            entry.reduction = Some(cert.to_doc());
        }
        Err(e) => {
            entry.method = "inconclusive";
            entry.error = Some(e.to_string());
        }
    }
    Ok(entry)
}

/// Runs the reductions for every k in `[2, k_max]`, then the replay search
/// over the implied k-range capped at `2^search_bits`.
pub fn certify(opts: &CertifyOptions) -> Result<CertifyReport> {
    if opts.k_max < 2 {
        return Err(kbm::Error::Domain("k_max must be at least 2".into()));
    }
    let per_k: Vec<PerK> = (2..=opts.k_max)
        .into_par_iter()
        .map(|k| certify_k(k, opts.m_cap.as_ref()))
        .collect::<Result<_>>()?;
    let inconclusive: Vec<u32> = per_k
        .iter()
        .filter(|p| p.method == "inconclusive")
        .map(|p| p.k)
        .collect();
    let combined_ell = per_k.iter().filter_map(|p| p.ell_bound).reduce(f64::max);
    let combined_m = match combined_ell {
        Some(l) => Some(bound_m_of_ell(l.ceil().max(3.0) as u64)?),
        None => None,
    };
    let all_full_cap = per_k.iter().all(|p| p.full_cap);

    let mut performed = None;
    let search = if opts.search_bits > 0 {
        let k_hi = combined_ell.map_or(opts.k_max, |l| (l.ceil() as u32).max(opts.k_max));
        let cfg = SearchConfig::with_bits(2, k_hi, opts.search_bits)?;
        let hits = search(&cfg)?;
        performed = Some(cfg.clone());
        let bound = cfg.value_bound.clone();
        let (known, unknown): (Vec<_>, Vec<_>) = hits
            .iter()
            .map(|h| h.value.clone())
            .partition(|v| KNOWN_HITS.iter().any(|h| BigUint::from(*h) == *v));
        let expected = KNOWN_HITS
            .iter()
            .filter(|h| BigUint::from(**h) <= bound)
            .count();
        let covers = combined_m.is_some_and(|m| (opts.search_bits as f64) >= m);
        Some(SearchSummary {
            k_min: 2,
            k_max: k_hi,
            value_bits: opts.search_bits,
            exactly_known: unknown.is_empty() && known.len() == expected,
            known_hits: known.iter().map(|v| v.to_string()).collect(),
            unknown_hits: unknown.iter().map(|v| v.to_string()).collect(),
            covers_bounds: covers,
            hits,
        })
    } else {
        None
    };
    let verdict = if search.is_some() && inconclusive.is_empty() {
        Verdict::ReplayedAtScale
    } else {
        Verdict::BoundOnly
    };
    Ok(CertifyReport {
        k_range: [2, opts.k_max],
        per_k,
        inconclusive,
        combined_ell_bound: combined_ell,
        combined_m_bound: combined_m,
        all_full_cap,
        search_performed: performed,
        search,
        verdict,
        endgame: endgame_discrepancy(),
    })
}
