//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped, tied magnitudes share their average rank.
//! Up to [`EXACT_MAX_N`] nonzero differences the two-sided p-value is exact:
//! the null distribution of the positive rank sum over all `2^n` sign
//! assignments is counted by dynamic programming on doubled ranks, so ties
//! stay exact too. Above that a tie-corrected normal approximation with a
//! 0.5 continuity correction is used.

use alloc::vec;
use alloc::vec::Vec;

use super::normal;
use super::{StatsError, TestMethod, TestResult};
use crate::math::sqrt;

pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMode {
    /// Exact up to [`EXACT_MAX_N`] nonzero differences, normal approximation above.
    Auto,
    Exact,
    NormalApprox,
}

/// Signed ranks of the nonzero differences.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedRanks {
    /// `(rank, positive)` per nonzero difference, input order.
    pub ranks: Vec<(f64, bool)>,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Sizes of groups of tied magnitudes (groups of one included).
    pub tie_groups: Vec<usize>,
}

impl SignedRanks {
    pub fn n(&self) -> usize {
        self.ranks.len()
    }
}

/// Ranks `|d|` over the nonzero entries of `d`, averaging ties.
pub fn signed_ranks(d: &[f64]) -> SignedRanks {
    let nonzero: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
    let mut order: Vec<usize> = (0..nonzero.len()).collect();
    order.sort_by(|&a, &b| nonzero[a].abs().total_cmp(&nonzero[b].abs()));

    let mut ranks = vec![0.0; nonzero.len()];
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mag = nonzero[order[start]].abs();
        let end = start + order[start..].iter().take_while(|&&i| nonzero[i].abs() == mag).count();
        // Ranks start+1 ..= end share their mean.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        tie_groups.push(end - start);
        start = end;
    }

    let ranks: Vec<(f64, bool)> = ranks.into_iter().zip(nonzero.iter().map(|v| *v > 0.0)).collect();
    let w_plus = ranks.iter().filter(|r| r.1).fold(0.0, |s, r| s + r.0);
    let w_minus = ranks.iter().filter(|r| !r.1).fold(0.0, |s, r| s + r.0);
    SignedRanks {
        ranks,
        w_plus,
        w_minus,
        tie_groups,
    }
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    wilcoxon_signed_rank_with(x, y, WilcoxonMode::Auto)
}

pub fn wilcoxon_signed_rank_with(x: &[f64], y: &[f64], mode: WilcoxonMode) -> Result<TestResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.is_empty() {
        return Err(StatsError::SampleTooSmall { n: 0, min: 1 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    wilcoxon_on_differences(&d, mode)
}

pub fn wilcoxon_on_differences(d: &[f64], mode: WilcoxonMode) -> Result<TestResult, StatsError> {
    let sr = signed_ranks(d);
    let n = sr.n();
    if n == 0 {
        return Err(StatsError::AllDifferencesZero);
    }
    let exact = match mode {
        WilcoxonMode::Auto => n <= EXACT_MAX_N,
        WilcoxonMode::Exact => {
            if n > EXACT_MAX_N {
                return Err(StatsError::ExactTooLarge { n, max: EXACT_MAX_N });
            }
            true
        }
        WilcoxonMode::NormalApprox => false,
    };
    let (method, p) = if exact {
        (TestMethod::WilcoxonExact, exact_p(&sr))
    } else {
        (TestMethod::WilcoxonNormalApprox, normal_p(&sr))
    };
    Ok(TestResult {
        method,
        statistic: sr.w_plus.min(sr.w_minus),
        p_value: p.clamp(f64::MIN_POSITIVE, 1.0),
        n_effective: n,
    })
}

/// Number of sign assignments whose doubled positive rank sum equals each value.
pub fn null_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    counts
}

fn exact_p(sr: &SignedRanks) -> f64 {
    let n = sr.n();
    // Average ranks are multiples of 1/2, so doubled ranks are integers.
    let doubled: Vec<u64> = sr.ranks.iter().map(|r| (r.0 * 2.0) as u64).collect();
    let counts = null_counts(&doubled);
    let stat = (sr.w_plus.min(sr.w_minus) * 2.0) as usize;
    let lower: u64 = counts[..=stat].iter().sum();
    let p = (2 * lower) as f64 / (1u64 << n) as f64;
    p.min(1.0)
}

fn normal_p(sr: &SignedRanks) -> f64 {
    let n = sr.n() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = sr
        .tie_groups
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let z = ((sr.w_plus - mean).abs() - 0.5).max(0.0) / sqrt(var);
    (2.0 * normal::sf(z)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_positive_differences() {
        let r = wilcoxon_on_differences(&[1.0, 2.0, 3.0, 4.0, 5.0], WilcoxonMode::Auto).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 0.0625);
        assert_eq!(r.method, TestMethod::WilcoxonExact);
    }

    #[test]
    fn symmetric_pair() {
        let r = wilcoxon_on_differences(&[1.0, -1.0], WilcoxonMode::Auto).unwrap();
        assert_eq!(r.statistic, 1.5);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn zeros_are_dropped() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 5.0], &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.n_effective, 3);
        assert_eq!(r.p_value, 0.25);
    }

    #[test]
    fn ranks_average_ties() {
        let sr = signed_ranks(&[2.0, -2.0, 1.0, 0.0, 3.0]);
        let ranks: Vec<f64> = sr.ranks.iter().map(|r| r.0).collect();
        assert_eq!(ranks, vec![2.5, 2.5, 1.0, 4.0]);
        assert_eq!(sr.w_plus, 7.5);
        assert_eq!(sr.w_minus, 2.5);
        assert_eq!(sr.tie_groups, vec![1, 2, 1]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]),
            Err(StatsError::LengthMismatch { x: 1, y: 2 })
        );
        assert_eq!(
            wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::AllDifferencesZero)
        );
        let big: Vec<f64> = (1..=30).map(f64::from).collect();
        assert_eq!(
            wilcoxon_on_differences(&big, WilcoxonMode::Exact),
            Err(StatsError::ExactTooLarge { n: 30, max: 25 })
        );
        assert_eq!(
            wilcoxon_on_differences(&big, WilcoxonMode::Auto).unwrap().method,
            TestMethod::WilcoxonNormalApprox
        );
    }

    #[test]
    fn null_counts_sum_to_two_to_the_n() {
        let counts = null_counts(&[2, 4, 6, 8]);
        assert_eq!(counts.iter().sum::<u64>(), 16);
        assert_eq!(counts[0], 1);
        assert_eq!(counts[20], 1);
    }
}
