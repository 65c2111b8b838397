//! Nonparametric tests and the completer-vs-dropout comparison.

mod compare;
pub mod normal;
mod shapiro;
mod wilcoxon;

use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare_cohort_rates, format_p_value, GroupComparisonReport, MIN_USABLE_STEPS};
pub use shapiro::shapiro_wilk;
pub use wilcoxon::{
    null_counts, signed_ranks, wilcoxon_on_differences, wilcoxon_signed_rank, wilcoxon_signed_rank_with, SignedRanks,
    WilcoxonMode, EXACT_MAX_N,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    ShapiroWilk,
    WilcoxonExact,
    WilcoxonNormalApprox,
}

impl TestMethod {
    pub const fn as_str(self) -> &'static str {
        match self {
            TestMethod::ShapiroWilk => "shapiro_wilk",
            TestMethod::WilcoxonExact => "wilcoxon_exact",
            TestMethod::WilcoxonNormalApprox => "wilcoxon_normal_approx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    /// Always in `(0, 1]`.
    pub p_value: f64,
    pub n_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("need at least {min} observations, got {n}")]
    SampleTooSmall { n: usize, min: usize },
    #[error("at most {max} observations supported, got {n}")]
    SampleTooLarge { n: usize, max: usize },
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("sample contains non-finite values")]
    NonFinite,
    #[error("paired samples differ in length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("all differences zero")]
    AllDifferencesZero,
    #[error("exact enumeration supports at most {max} nonzero differences, got {n}")]
    ExactTooLarge { n: usize, max: usize },
    #[error("only {usable} steps are left by both cohorts, need {min}")]
    TooFewSteps { usable: usize, min: usize },
    #[error("cohort rates are not aligned on steps ({0})")]
    Misaligned(String),
}
