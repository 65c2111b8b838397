use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const fn seconds(self) -> i64 {
        self.0
    }

    pub const fn offset(self, secs: i64) -> Timestamp {
        Timestamp(self.0 + secs)
    }
}

/// Position of a step in the designed course, `week.step`, both 1-based.
///
/// Ordering is lexicographic on `(week, step)`, which is also the designed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StepId {
    week: u32,
    step: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepIdError {
    #[error("week must be >= 1")]
    ZeroWeek,
    #[error("step must be >= 1")]
    ZeroStep,
    #[error("malformed step id {0:?}, expected <week>.<step>")]
    Malformed(String),
}

impl StepId {
    pub fn new(week: u32, step: u32) -> Result<Self, StepIdError> {
        if week == 0 {
            return Err(StepIdError::ZeroWeek);
        }
        if step == 0 {
            return Err(StepIdError::ZeroStep);
        }
        Ok(StepId { week, step })
    }

    pub const fn week(self) -> u32 {
        self.week
    }

    pub const fn step(self) -> u32 {
        self.step
    }
}

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.week, self.step)
    }
}

impl FromStr for StepId {
    type Err = StepIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || StepIdError::Malformed(String::from(s));
        let (w, st) = s.split_once('.').ok_or_else(malformed)?;
        let week = w.parse().map_err(|_| malformed())?;
        let step = st.parse().map_err(|_| malformed())?;
        StepId::new(week, step)
    }
}

/// Activity category of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theme {
    Video,
    Article,
    Quiz,
    Discussion,
    Assignment,
    Review,
    FeedbackView,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown theme {0:?}")]
pub struct UnknownTheme(pub String);

impl Theme {
    pub const COUNT: usize = 7;

    pub const ALL: [Theme; Theme::COUNT] = [
        Theme::Video,
        Theme::Article,
        Theme::Quiz,
        Theme::Discussion,
        Theme::Assignment,
        Theme::Review,
        Theme::FeedbackView,
    ];

    /// Dense index in `0..Theme::COUNT`, following [`Theme::ALL`].
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Theme::Video => "video",
            Theme::Article => "article",
            Theme::Quiz => "quiz",
            Theme::Discussion => "discussion",
            Theme::Assignment => "assignment",
            Theme::Review => "review",
            Theme::FeedbackView => "feedback_view",
        }
    }

    /// Folds peer review and feedback viewing into `Assignment`.
    pub const fn merge_assessment(self) -> Theme {
        match self {
            Theme::Review | Theme::FeedbackView => Theme::Assignment,
            other => other,
        }
    }
}

impl fmt::Display for Theme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theme {
    type Err = UnknownTheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let theme = match norm.as_str() {
            "video" => Theme::Video,
            "article" => Theme::Article,
            "quiz" => Theme::Quiz,
            "discussion" => Theme::Discussion,
            "assignment" => Theme::Assignment,
            "review" => Theme::Review,
            "feedbackview" => Theme::FeedbackView,
            _ => return Err(UnknownTheme(String::from(s))),
        };
        Ok(theme)
    }
}

/// One first-visit click.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityEvent {
    pub learner_id: String,
    pub step: StepId,
    pub theme: Theme,
    pub first_visited_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CourseStep {
    pub id: StepId,
    pub theme: Theme,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("length >= 2 required, got {0} steps")]
    TooShort(usize),
    #[error("duplicate step {0}")]
    DuplicateStep(StepId),
    #[error("steps not strictly increasing at {0}")]
    NotIncreasing(StepId),
    #[error("run_start must precede run_end")]
    EmptyRun,
}

/// The designed, ordered sequence of themed steps for one course run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourseStructure {
    run_label: String,
    steps: Vec<CourseStep>,
    run_start: Timestamp,
    run_end: Timestamp,
}

/// Events may arrive up to this long after the run closes.
pub const LATE_ACCESS_GRACE_SECS: i64 = 30 * 24 * 3600;

impl CourseStructure {
    pub fn new(
        run_label: impl Into<String>,
        steps: Vec<CourseStep>,
        run_start: Timestamp,
        run_end: Timestamp,
    ) -> Result<Self, StructureError> {
        if steps.len() < 2 {
            return Err(StructureError::TooShort(steps.len()));
        }
        for pair in steps.windows(2) {
            let (prev, next) = (pair[0].id, pair[1].id);
            if prev == next {
                return Err(StructureError::DuplicateStep(next));
            }
            if next < prev {
                // Report a duplicate before an ordering problem when both apply.
                if let Some(dup) = first_duplicate(&steps) {
                    return Err(StructureError::DuplicateStep(dup));
                }
                return Err(StructureError::NotIncreasing(next));
            }
        }
        if run_start >= run_end {
            return Err(StructureError::EmptyRun);
        }
        Ok(CourseStructure {
            run_label: run_label.into(),
            steps,
            run_start,
            run_end,
        })
    }

    pub fn run_label(&self) -> &str {
        &self.run_label
    }

    pub fn steps(&self) -> &[CourseStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn run_start(&self) -> Timestamp {
        self.run_start
    }

    pub fn run_end(&self) -> Timestamp {
        self.run_end
    }

    /// Designed position of `step`, if it belongs to the course.
    pub fn index_of(&self, step: StepId) -> Option<usize> {
        self.steps.binary_search_by(|s| s.id.cmp(&step)).ok()
    }

    pub fn contains(&self, step: StepId) -> bool {
        self.index_of(step).is_some()
    }

    pub fn theme_of(&self, step: StepId) -> Option<Theme> {
        self.index_of(step).map(|i| self.steps[i].theme)
    }

    /// Number of steps carrying each theme, indexed by [`Theme::index`].
    pub fn theme_counts(&self) -> [usize; Theme::COUNT] {
        let mut counts = [0; Theme::COUNT];
        for s in &self.steps {
            counts[s.theme.index()] += 1;
        }
        counts
    }

    /// Whether `t` lies inside the accepted event window of this run.
    pub fn accepts_time(&self, t: Timestamp) -> bool {
        t >= self.run_start && t <= self.run_end.offset(LATE_ACCESS_GRACE_SECS)
    }
}

fn first_duplicate(steps: &[CourseStep]) -> Option<StepId> {
    let mut ids: Vec<StepId> = steps.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    ids.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}
