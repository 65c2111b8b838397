//! Course structures, first-access learner paths, cohort labels and
//! synthetic cohorts.

mod cohort;
mod course;
mod paths;
pub mod synth;

pub use cohort::{label_cohorts, summarize_cohorts, CohortLabel, CohortSummary, CompletionThreshold, InvalidThreshold};
pub use course::{
    ActivityEvent, CourseStep, CourseStructure, StepId, StepIdError, StructureError, Theme, Timestamp, UnknownTheme,
    LATE_ACCESS_GRACE_SECS,
};
pub use paths::{build_paths, EventIssue, IssueKind, LearnerPath, PathError, PathSet, Visit};
pub use synth::{generate_synthetic, mixed_theme_structure, SynthConfig, SynthError, ThemeWeights};
