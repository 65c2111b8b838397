use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{BoostError, FeatureMatrix, TrainConfig};
use crate::ingest::{CohortLabel, CourseStructure, LearnerPath, Theme};

pub const N_FEATURES: usize = 2 * Theme::COUNT;

/// Early-window activity: seconds spent per theme, then visits per theme,
/// both in [`Theme::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn time_spent(&self, theme: Theme) -> f64 {
        self.0[theme.index()]
    }

    pub fn count(&self, theme: Theme) -> f64 {
        self.0[Theme::COUNT + theme.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn feature_name(index: usize) -> String {
        let theme = Theme::ALL[index % Theme::COUNT];
        if index < Theme::COUNT {
            alloc::format!("time_{theme}")
        } else {
            alloc::format!("count_{theme}")
        }
    }
}

/// End of the early window, in seconds since the epoch.
pub fn window_end(structure: &CourseStructure, fraction: f64) -> f64 {
    let start = structure.run_start().seconds() as f64;
    let end = structure.run_end().seconds() as f64;
    start + fraction * (end - start)
}

/// Per-theme time and visit counts from the visits inside the early window.
///
/// A visit's time is the gap to the next in-window visit, capped; the last
/// in-window visit contributes nothing.
pub fn extract_features(path: &LearnerPath, structure: &CourseStructure, config: &TrainConfig) -> FeatureVector {
    let start = structure.run_start();
    let end = window_end(structure, config.early_window_fraction);
    let in_window: Vec<_> = path
        .visits()
        .iter()
        .filter(|v| v.at >= start && v.at.seconds() as f64 <= end)
        .collect();
    let mut out = [0.0; N_FEATURES];
    for (i, v) in in_window.iter().enumerate() {
        if let Some(next) = in_window.get(i + 1) {
            let gap = (next.at.seconds() - v.at.seconds()) as f64;
            out[v.theme.index()] += gap.min(config.session_gap_cap_seconds);
        }
        out[Theme::COUNT + v.theme.index()] += 1.0;
    }
    FeatureVector(out)
}

/// Whether a learner dropped out inside the early window.
pub fn label_early(
    path: &LearnerPath,
    label: CohortLabel,
    structure: &CourseStructure,
    config: &TrainConfig,
) -> Result<bool, BoostError> {
    if label == CohortLabel::NeverAccessed {
        return Err(BoostError::NeverAccessed(String::from(path.learner_id())));
    }
    let Some(last) = path.last() else {
        return Err(BoostError::NeverAccessed(String::from(path.learner_id())));
    };
    let end = window_end(structure, config.early_window_fraction);
    Ok(label == CohortLabel::Dropout && last.at.seconds() as f64 <= end)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EarlyDataset {
    pub learner_ids: Vec<String>,
    pub features: FeatureMatrix,
    pub labels: Vec<bool>,
}

/// Features and early-dropout labels for every learner who accessed the course.
pub fn early_dropout_dataset(
    paths: &BTreeMap<String, LearnerPath>,
    labels: &BTreeMap<String, CohortLabel>,
    structure: &CourseStructure,
    config: &TrainConfig,
) -> Result<EarlyDataset, BoostError> {
    let mut learner_ids = Vec::new();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (id, path) in paths {
        let label = labels.get(id).copied().unwrap_or(CohortLabel::NeverAccessed);
        if label == CohortLabel::NeverAccessed || path.is_empty() {
            continue;
        }
        y.push(label_early(path, label, structure, config)?);
        rows.extend_from_slice(extract_features(path, structure, config).as_slice());
        learner_ids.push(id.clone());
    }
    Ok(EarlyDataset {
        learner_ids,
        features: FeatureMatrix::new(rows, N_FEATURES)?,
        labels: y,
    })
}
