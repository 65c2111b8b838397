use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::course::{ActivityEvent, CourseStructure, StepId, Theme, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub step: StepId,
    pub theme: Theme,
    pub at: Timestamp,
}

/// A learner's first accesses, in time order.
///
/// Every step appears at most once and timestamps never decrease.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerPath {
    learner_id: String,
    visits: Vec<Visit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("learner id must be nonempty")]
    EmptyLearnerId,
    #[error("step {0} visited more than once")]
    RepeatedStep(StepId),
    #[error("visit to {0} is earlier than the visit before it")]
    TimeReversal(StepId),
}

impl LearnerPath {
    /// Builds a path from visits already in time order.
    pub fn from_visits(learner_id: impl Into<String>, visits: Vec<Visit>) -> Result<Self, PathError> {
        let learner_id = learner_id.into();
        if learner_id.is_empty() {
            return Err(PathError::EmptyLearnerId);
        }
        for pair in visits.windows(2) {
            if pair[1].at < pair[0].at {
                return Err(PathError::TimeReversal(pair[1].step));
            }
        }
        let mut seen: Vec<StepId> = visits.iter().map(|v| v.step).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(PathError::RepeatedStep(w[0]));
        }
        Ok(LearnerPath { learner_id, visits })
    }

    pub fn learner_id(&self) -> &str {
        &self.learner_id
    }

    pub fn visits(&self) -> &[Visit] {
        &self.visits
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn last(&self) -> Option<&Visit> {
        self.visits.last()
    }

    pub fn steps(&self) -> impl Iterator<Item = StepId> + '_ {
        self.visits.iter().map(|v| v.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// The event has no learner id; the event was dropped.
    MissingLearner,
    /// The step is not part of the course; the event was dropped.
    UnknownStep,
    /// The timestamp falls outside the run (plus grace period); the event was dropped.
    OutsideRun,
    /// The event's theme disagrees with the course; the course theme was kept.
    ThemeMismatch { event: Theme, course: Theme },
}

impl IssueKind {
    pub fn is_skip(self) -> bool {
        !matches!(self, IssueKind::ThemeMismatch { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventIssue {
    /// Position of the event in the input sequence.
    pub index: usize,
    pub learner_id: String,
    pub step: StepId,
    pub kind: IssueKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathSet {
    pub paths: BTreeMap<String, LearnerPath>,
    pub issues: Vec<EventIssue>,
}

impl PathSet {
    pub fn skipped(&self) -> impl Iterator<Item = &EventIssue> {
        self.issues.iter().filter(|i| i.kind.is_skip())
    }
}

/// Groups events per learner, keeps the first access to every step and orders
/// the visits by timestamp, breaking ties by step.
pub fn build_paths(events: &[ActivityEvent], structure: &CourseStructure) -> PathSet {
    let mut issues = Vec::new();
    let mut first_access: BTreeMap<&str, BTreeMap<StepId, Visit>> = BTreeMap::new();

    for (index, ev) in events.iter().enumerate() {
        let issue = |kind| EventIssue {
            index,
            learner_id: ev.learner_id.clone(),
            step: ev.step,
            kind,
        };
        if ev.learner_id.is_empty() {
            issues.push(issue(IssueKind::MissingLearner));
            continue;
        }
        let Some(course_theme) = structure.theme_of(ev.step) else {
            issues.push(issue(IssueKind::UnknownStep));
            continue;
        };
        if !structure.accepts_time(ev.first_visited_at) {
            issues.push(issue(IssueKind::OutsideRun));
            continue;
        }
        if ev.theme != course_theme {
            issues.push(issue(IssueKind::ThemeMismatch {
                event: ev.theme,
                course: course_theme,
            }));
        }
        let visit = Visit {
            step: ev.step,
            theme: course_theme,
            at: ev.first_visited_at,
        };
        first_access
            .entry(ev.learner_id.as_str())
            .or_default()
            .entry(ev.step)
            .and_modify(|kept| {
                if visit.at < kept.at {
                    *kept = visit;
                }
            })
            .or_insert(visit);
    }

    let paths = first_access
        .into_iter()
        .map(|(id, by_step)| {
            let mut visits: Vec<Visit> = by_step.into_values().collect();
            visits.sort_by_key(|v| (v.at, v.step));
            let learner_id = String::from(id);
            (learner_id.clone(), LearnerPath { learner_id, visits })
        })
        .collect();

    PathSet { paths, issues }
}
