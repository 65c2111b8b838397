use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::transition::{extract_transitions, PathflowError};
use crate::ingest::{CohortLabel, CourseStructure, LearnerPath, StepId};

/// How one cohort leaves one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRate {
    pub step: StepId,
    pub cohort: CohortLabel,
    /// Learners of the cohort with a transition out of `step`.
    pub n_leavers: u64,
    pub n_linear: u64,
    pub n_catch_up: u64,
    pub linear_pct: f64,
    pub catchup_pct: f64,
}

/// Per-step leaving rates for both cohorts, aligned on the designed order.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortStepRates {
    pub completer: Vec<StepRate>,
    pub dropout: Vec<StepRate>,
}

impl CohortStepRates {
    /// The same rates with the two cohorts exchanged.
    pub fn swapped(&self) -> CohortStepRates {
        CohortStepRates {
            completer: self.dropout.clone(),
            dropout: self.completer.clone(),
        }
    }
}

pub fn per_step_rates(
    paths: &BTreeMap<String, LearnerPath>,
    labels: &BTreeMap<String, CohortLabel>,
    structure: &CourseStructure,
) -> Result<CohortStepRates, PathflowError> {
    let mut completer = Tally::new(structure);
    let mut dropout = Tally::new(structure);
    for (id, path) in paths {
        let tally = match labels.get(id) {
            Some(CohortLabel::Completer) => &mut completer,
            Some(CohortLabel::Dropout) => &mut dropout,
            _ => continue,
        };
        tally.members += 1;
        for t in extract_transitions(path, structure)? {
            let i = structure.index_of(t.from).ok_or(PathflowError::UnknownStep(t.from))?;
            tally.counts[i].0 += 1;
            if t.kind.is_catch_up() {
                tally.counts[i].2 += 1;
            } else {
                tally.counts[i].1 += 1;
            }
        }
    }
    if completer.members == 0 {
        return Err(PathflowError::EmptyCohort("completer"));
    }
    if dropout.members == 0 {
        return Err(PathflowError::EmptyCohort("dropout"));
    }
    Ok(CohortStepRates {
        completer: completer.finish(structure, CohortLabel::Completer),
        dropout: dropout.finish(structure, CohortLabel::Dropout),
    })
}

struct Tally {
    members: usize,
    /// (leavers, linear, catch-up) per designed step.
    counts: Vec<(u64, u64, u64)>,
}

impl Tally {
    fn new(structure: &CourseStructure) -> Self {
        Tally {
            members: 0,
            counts: alloc::vec![(0, 0, 0); structure.len()],
        }
    }

    fn finish(self, structure: &CourseStructure, cohort: CohortLabel) -> Vec<StepRate> {
        structure
            .steps()
            .iter()
            .zip(self.counts)
            .map(|(s, (n_leavers, n_linear, n_catch_up))| {
                let pct = |k: u64| {
                    if n_leavers == 0 {
                        0.0
                    } else {
                        100.0 * k as f64 / n_leavers as f64
                    }
                };
                StepRate {
                    step: s.id,
                    cohort,
                    n_leavers,
                    n_linear,
                    n_catch_up,
                    linear_pct: pct(n_linear),
                    catchup_pct: pct(n_catch_up),
                }
            })
            .collect()
    }
}
