use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::shapiro::{shapiro_wilk, MIN_N as SHAPIRO_MIN_N};
use super::wilcoxon::wilcoxon_signed_rank;
use super::{StatsError, TestResult};
use crate::pathflow::{CohortStepRates, StepRate};

/// Fewest steps two cohorts must both leave for the paired comparison.
pub const MIN_USABLE_STEPS: usize = 6;

/// Completer-vs-dropout comparison for one course run.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupComparisonReport {
    pub run_label: String,
    pub linear: TestResult,
    pub catchup: TestResult,
    /// Steps left by both cohorts, i.e. the number of pairs.
    pub n_steps: usize,
    /// Normality of the paired differences; informative only.
    pub linear_normality: Option<TestResult>,
    pub catchup_normality: Option<TestResult>,
}

/// Pairs per-step linear and catch-up percentages of completers and dropouts
/// and runs a signed-rank test on each.
pub fn compare_cohort_rates(run_label: &str, rates: &CohortStepRates) -> Result<GroupComparisonReport, StatsError> {
    let pairs: Vec<(&StepRate, &StepRate)> = rates
        .completer
        .iter()
        .zip(&rates.dropout)
        .filter(|(c, d)| c.n_leavers > 0 && d.n_leavers > 0)
        .collect();
    if let Some((c, d)) = pairs.iter().find(|(c, d)| c.step != d.step) {
        return Err(StatsError::Misaligned(format!("{} vs {}", c.step, d.step)));
    }
    if pairs.len() < MIN_USABLE_STEPS {
        return Err(StatsError::TooFewSteps {
            usable: pairs.len(),
            min: MIN_USABLE_STEPS,
        });
    }

    let column = |f: fn(&StepRate) -> f64| -> (Vec<f64>, Vec<f64>) { pairs.iter().map(|(c, d)| (f(c), f(d))).unzip() };
    let (lin_c, lin_d) = column(|r| r.linear_pct);
    let (cu_c, cu_d) = column(|r| r.catchup_pct);

    let linear = wilcoxon_signed_rank(&lin_c, &lin_d)?;
    let catchup = wilcoxon_signed_rank(&cu_c, &cu_d)?;
    Ok(GroupComparisonReport {
        run_label: String::from(run_label),
        linear,
        catchup,
        n_steps: pairs.len(),
        linear_normality: normality(&lin_c, &lin_d),
        catchup_normality: normality(&cu_c, &cu_d),
    })
}

fn normality(x: &[f64], y: &[f64]) -> Option<TestResult> {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if d.len() < SHAPIRO_MIN_N {
        return None;
    }
    shapiro_wilk(&d).ok()
}

/// Scientific notation with three significant digits, e.g. `1.13E-13`.
pub fn format_p_value(p: f64) -> String {
    format!("{p:.2E}")
}
