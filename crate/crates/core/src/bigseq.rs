//! Exact generation of k-generalized Fibonacci numbers.
//!
//! `F^(k)` starts with `k` seed terms `0, ..., 0, 1` at indices
//! `-(k-2), ..., 1`; every later term is the sum of the `k` preceding ones.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position `n` in `F^(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermIndex {
    pub k: u32,
    pub n: i64,
}

impl TermIndex {
    pub fn new(k: u32, n: i64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        let min = first_index(k);
        if n < min {
            return Err(Error::IndexBelowRange { k, n, min });
        }
        Ok(TermIndex { k, n })
    }
}

/// First defined index `-(k-2)`.
pub fn first_index(k: u32) -> i64 {
    2 - k as i64
}

/// Sliding window over the `k` most recent terms, newest last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceWindow {
    k: u32,
    window: VecDeque<BigUint>,
    running_sum: BigUint,
    frontier: i64,
}

impl SequenceWindow {
    /// Window whose newest term is `F_1 = 1`.
    pub fn initial(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        let mut window: VecDeque<BigUint> = (0..k - 1).map(|_| BigUint::zero()).collect();
        window.push_back(BigUint::one());
        Ok(SequenceWindow {
            k,
            window,
            running_sum: BigUint::one(),
            frontier: 1,
        })
    }

    /// Window from raw parts; the sum is recomputed, the terms are not
    /// checked against the sequence (see [`SequenceWindow::is_genuine`]).
    pub fn from_parts(k: u32, window: Vec<BigUint>, frontier: i64) -> Result<Self> {
        if k < 2 || window.len() != k as usize {
            return Err(Error::Domain(format!(
                "window of {} terms does not match k = {k}",
                window.len()
            )));
        }
        let running_sum = window.iter().sum();
        Ok(SequenceWindow {
            k,
            window: window.into(),
            running_sum,
            frontier,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn frontier(&self) -> i64 {
        self.frontier
    }

    /// Newest term `F_frontier`.
    pub fn newest(&self) -> &BigUint {
        self.window.back().expect("window is never empty")
    }

    pub fn running_sum(&self) -> &BigUint {
        &self.running_sum
    }

    /// Terms `F_{frontier-k+1} ..= F_frontier`, oldest first.
    pub fn terms(&self) -> impl Iterator<Item = &BigUint> {
        self.window.iter()
    }

    /// Shifts the window in place and returns the new newest term.
    pub fn step(&mut self) -> &BigUint {
        let next = self.running_sum.clone();
        let evicted = self.window.pop_front().expect("window is never empty");
        self.running_sum = &self.running_sum + &next - evicted;
        self.window.push_back(next);
        self.frontier += 1;
        self.newest()
    }

    /// Functional form of [`SequenceWindow::step`].
    pub fn advance(&self) -> (SequenceWindow, BigUint) {
        let mut next = self.clone();
        let term = next.step().clone();
        (next, term)
    }

    /// Checks the window against freshly generated terms.
    pub fn is_genuine(&self) -> bool {
        let start = self.frontier - self.k as i64 + 1;
        let terms_ok = (start..=self.frontier)
            .zip(self.window.iter())
            .all(|(n, t)| kbonacci(self.k, n).map(|e| &e == t).unwrap_or(false));
        terms_ok && self.running_sum == self.window.iter().sum::<BigUint>()
    }
}

/// Window positioned so that its newest term is `F_n`.
pub fn window_at(k: u32, n: i64) -> Result<SequenceWindow> {
    if n < 1 {
        return Err(Error::IndexBelowRange { k, n, min: 1 });
    }
    let mut w = SequenceWindow::initial(k)?;
    while w.frontier < n {
        w.step();
    }
    Ok(w)
}

/// `F_n^(k)` exactly.
pub fn term(idx: TermIndex) -> Result<BigUint> {
    let TermIndex { k, n } = TermIndex::new(idx.k, idx.n)?;
    if n <= 0 {
        return Ok(BigUint::zero());
    }
    if n <= k as i64 + 1 {
        // Power-of-two prefix 1, 1, 2, 4, ..., 2^(k-1).
        return Ok(if n == 1 {
            BigUint::one()
        } else {
            BigUint::one() << (n - 2) as u64
        });
    }
    Ok(window_at(k, n)?.newest().clone())
}

/// Convenience wrapper around [`term`].
pub fn kbonacci(k: u32, n: i64) -> Result<BigUint> {
    term(TermIndex { k, n })
}

/// Consecutive terms `F_from, F_{from+1}, ...` of `F^(k)`, `from >= 1`.
pub fn terms_from(k: u32, from: i64) -> Result<impl Iterator<Item = BigUint>> {
    let mut w = window_at(k, from)?;
    let mut first = true;
    Ok(std::iter::from_fn(move || {
        if first {
            first = false;
        } else {
            w.step();
        }
        Some(w.newest().clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn known_terms() {
        assert_eq!(kbonacci(2, 7).unwrap(), big(13));
        assert_eq!(kbonacci(3, 12).unwrap(), big(504));
        assert_eq!(kbonacci(3, 6).unwrap(), big(13));
        assert_eq!(kbonacci(7, 11).unwrap(), big(504));
        assert_eq!(kbonacci(5, 1).unwrap(), big(1));
        assert_eq!(kbonacci(9, 10).unwrap(), big(256));
        assert_eq!(kbonacci(4, -2).unwrap(), big(0));
    }

    #[test]
    fn below_range_is_rejected() {
        assert_eq!(
            kbonacci(4, -3),
            Err(Error::IndexBelowRange {
                k: 4,
                n: -3,
                min: -2
            })
        );
        assert!(kbonacci(1, 3).is_err());
    }

    #[test]
    fn advance_examples() {
        let w = SequenceWindow::from_parts(2, vec![big(5), big(8)], 6).unwrap();
        let (next, t) = w.advance();
        assert_eq!(t, big(13));
        assert_eq!(
            next.terms().cloned().collect::<Vec<_>>(),
            vec![big(8), big(13)]
        );
        assert_eq!(next.frontier(), 7);
        assert!(next.is_genuine());

        let w = SequenceWindow::from_parts(3, vec![big(0), big(0), big(1)], 1).unwrap();
        assert_eq!(w.advance().1, big(1));

        let zeros = SequenceWindow::from_parts(4, vec![big(0); 4], 10).unwrap();
        let (next, t) = zeros.advance();
        assert_eq!(t, big(0));
        assert_eq!(next.running_sum(), zeros.running_sum());
    }

    #[test]
    fn window_at_examples() {
        let w = window_at(2, 2).unwrap();
        assert_eq!(w.terms().cloned().collect::<Vec<_>>(), vec![big(1), big(1)]);
        let w = window_at(3, 5).unwrap();
        assert_eq!(
            w.terms().cloned().collect::<Vec<_>>(),
            vec![big(2), big(4), big(7)]
        );
        let w = window_at(6, 8).unwrap();
        assert_eq!(w.newest(), &big(63));
        assert!(matches!(
            window_at(3, 0),
            Err(Error::IndexBelowRange { .. })
        ));
    }

    #[test]
    fn power_of_two_prefix() {
        for k in 2..=30u32 {
            for n in 2..=(k as i64 + 1) {
                let expected = BigUint::one() << (n - 2) as u64;
                assert_eq!(kbonacci(k, n).unwrap(), expected);
                // Also via the window, not the shortcut.
                assert_eq!(window_at(k, n).unwrap().newest(), &expected);
            }
        }
    }

    #[test]
    fn doubling_identity() {
        for k in 2..=20u32 {
            let terms: Vec<BigUint> = terms_from(k, 1)
                .unwrap()
                .take(200 + k as usize + 1)
                .collect();
            let f = |n: i64| &terms[(n - 1) as usize];
            for n in 2..=200i64 {
                let lhs = f(n + k as i64);
                let rhs = f(n + k as i64 - 1) * 2u32 - f(n - 1);
                assert_eq!(lhs, &rhs, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn nondecreasing() {
        for k in 2..=12u32 {
            let terms: Vec<BigUint> = terms_from(k, 1).unwrap().take(150).collect();
            assert!(terms.windows(2).all(|w| w[0] <= w[1]));
            assert!(terms[1..].windows(2).all(|w| w[0] < w[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn stepping_matches_direct_terms(k in 2u32..40, start in 1i64..60) {
            let mut w = window_at(k, start).unwrap();
            for _ in 0..200 {
                let n = w.frontier() + 1;
                let t = w.step().clone();
                prop_assert_eq!(&t, &kbonacci(k, n).unwrap());
                prop_assert_eq!(w.running_sum(), &w.terms().sum::<BigUint>());
            }
        }
    }
}
