use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CourseStructure, LearnerPath, StepId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    /// To the immediate designed successor.
    Linear,
    /// Past the immediate successor.
    JumpForward,
    /// To any earlier step.
    JumpBackward,
}

impl TransitionKind {
    /// Forward and backward jumps together form the catch-up pattern.
    pub const fn is_catch_up(self) -> bool {
        !matches!(self, TransitionKind::Linear)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub learner_id: String,
    pub from: StepId,
    pub to: StepId,
    pub kind: TransitionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathflowError {
    #[error("step {0} is not part of the course")]
    UnknownStep(StepId),
    #[error("transition from {0} to itself")]
    SelfTransition(StepId),
    #[error("no paths to aggregate")]
    EmptyPathSet,
    #[error("{0} cohort has no paths")]
    EmptyCohort(&'static str),
    #[error("block size must be >= 1")]
    ZeroBlockSize,
}

pub fn classify_transition(
    from: StepId,
    to: StepId,
    structure: &CourseStructure,
) -> Result<TransitionKind, PathflowError> {
    if from == to {
        return Err(PathflowError::SelfTransition(from));
    }
    let i = structure.index_of(from).ok_or(PathflowError::UnknownStep(from))?;
    let j = structure.index_of(to).ok_or(PathflowError::UnknownStep(to))?;
    Ok(if j == i + 1 {
        TransitionKind::Linear
    } else if j > i {
        TransitionKind::JumpForward
    } else {
        TransitionKind::JumpBackward
    })
}

/// Consecutive hops of `path`, classified against the designed order.
pub fn extract_transitions(path: &LearnerPath, structure: &CourseStructure) -> Result<Vec<Transition>, PathflowError> {
    path.visits()
        .windows(2)
        .map(|pair| {
            let (from, to) = (pair[0].step, pair[1].step);
            Ok(Transition {
                learner_id: String::from(path.learner_id()),
                from,
                to,
                kind: classify_transition(from, to, structure)?,
            })
        })
        .collect()
}
