use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::course::CourseStructure;
use super::paths::LearnerPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CohortLabel {
    Completer,
    Dropout,
    NeverAccessed,
}

impl CohortLabel {
    pub const fn as_str(self) -> &'static str {
        match self {
            CohortLabel::Completer => "completer",
            CohortLabel::Dropout => "dropout",
            CohortLabel::NeverAccessed => "never_accessed",
        }
    }
}

/// Minimum fraction of distinct steps a completer must have accessed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CompletionThreshold(f64);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("completion threshold must lie in (0, 1], got {0}")]
pub struct InvalidThreshold(pub f64);

impl CompletionThreshold {
    pub const DEFAULT: CompletionThreshold = CompletionThreshold(0.8);

    pub fn new(fraction: f64) -> Result<Self, InvalidThreshold> {
        if fraction > 0.0 && fraction <= 1.0 {
            Ok(CompletionThreshold(fraction))
        } else {
            Err(InvalidThreshold(fraction))
        }
    }

    pub const fn get(self) -> f64 {
        self.0
    }

    /// Whether `accessed` of `total` distinct steps meets the threshold.
    pub fn is_met(self, accessed: usize, total: usize) -> bool {
        if total == 0 {
            return false;
        }
        // 1e-12 absorbs representation error, e.g. 0.7 * 10 vs 7.
        accessed as f64 / total as f64 + 1e-12 >= self.0
    }

    /// Smallest number of distinct steps out of `total` that meets the threshold.
    pub fn min_steps(self, total: usize) -> usize {
        (0..=total).find(|&k| self.is_met(k, total)).unwrap_or(total)
    }
}

impl Default for CompletionThreshold {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<f64> for CompletionThreshold {
    type Error = InvalidThreshold;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        CompletionThreshold::new(v)
    }
}

impl From<CompletionThreshold> for f64 {
    fn from(t: CompletionThreshold) -> f64 {
        t.0
    }
}

/// Labels every enrolled learner and every learner with a path.
///
/// Learners without a path are `NeverAccessed`; the rest are `Completer` when
/// their distinct-step coverage meets `threshold`, `Dropout` otherwise.
pub fn label_cohorts<'a, I>(
    paths: &BTreeMap<String, LearnerPath>,
    enrolled: I,
    structure: &CourseStructure,
    threshold: CompletionThreshold,
) -> BTreeMap<String, CohortLabel>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut labels: BTreeMap<String, CohortLabel> = enrolled
        .into_iter()
        .map(|id| (String::from(id), CohortLabel::NeverAccessed))
        .collect();
    for (id, path) in paths {
        let label = if path.is_empty() {
            CohortLabel::NeverAccessed
        } else if threshold.is_met(path.len(), structure.len()) {
            CohortLabel::Completer
        } else {
            CohortLabel::Dropout
        };
        labels.insert(id.clone(), label);
    }
    labels
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub enrolled: usize,
    pub accessed_at_least_one: usize,
    pub dropout: usize,
    pub completers: usize,
}

pub fn summarize_cohorts(labels: &BTreeMap<String, CohortLabel>) -> CohortSummary {
    let mut summary = CohortSummary {
        enrolled: labels.len(),
        ..CohortSummary::default()
    };
    for label in labels.values() {
        match label {
            CohortLabel::Completer => summary.completers += 1,
            CohortLabel::Dropout => summary.dropout += 1,
            CohortLabel::NeverAccessed => {}
        }
    }
    summary.accessed_at_least_one = summary.completers + summary.dropout;
    summary
}
