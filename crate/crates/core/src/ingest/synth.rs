//! Seeded synthetic cohorts.
//!
//! Completers walk the whole course, mostly along the designed order.
//! Dropouts leave early under a per-theme hazard and jump more often, mostly
//! forward. The parameters are behavioural knobs, not estimates from any
//! real course.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cohort::CompletionThreshold;
use super::course::{ActivityEvent, CourseStep, CourseStructure, StepId, Theme, Timestamp, LATE_ACCESS_GRACE_SECS};
use crate::math;

/// A multiplier per theme, 1.0 unless overridden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThemeWeights {
    pub video: f64,
    pub article: f64,
    pub quiz: f64,
    pub discussion: f64,
    pub assignment: f64,
    pub review: f64,
    pub feedback_view: f64,
}

impl ThemeWeights {
    pub const fn uniform(w: f64) -> Self {
        ThemeWeights {
            video: w,
            article: w,
            quiz: w,
            discussion: w,
            assignment: w,
            review: w,
            feedback_view: w,
        }
    }

    pub fn get(&self, theme: Theme) -> f64 {
        match theme {
            Theme::Video => self.video,
            Theme::Article => self.article,
            Theme::Quiz => self.quiz,
            Theme::Discussion => self.discussion,
            Theme::Assignment => self.assignment,
            Theme::Review => self.review,
            Theme::FeedbackView => self.feedback_view,
        }
    }

    pub fn set(&mut self, theme: Theme, w: f64) {
        let slot = match theme {
            Theme::Video => &mut self.video,
            Theme::Article => &mut self.article,
            Theme::Quiz => &mut self.quiz,
            Theme::Discussion => &mut self.discussion,
            Theme::Assignment => &mut self.assignment,
            Theme::Review => &mut self.review,
            Theme::FeedbackView => &mut self.feedback_view,
        };
        *slot = w;
    }

    fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        Theme::ALL.into_iter().map(|t| self.get(t))
    }
}

impl Default for ThemeWeights {
    fn default() -> Self {
        ThemeWeights::uniform(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_completers: usize,
    pub n_dropouts: usize,
    pub p_linear_completer: f64,
    pub p_linear_dropout: f64,
    pub p_forward_given_jump: f64,
    /// Base probability that a dropout stops after any given step.
    pub dropout_hazard: f64,
    /// Per-theme multiplier on `dropout_hazard`, keyed by the current step's theme.
    pub theme_hazard: ThemeWeights,
    pub mean_gap_completer_secs: f64,
    pub mean_gap_dropout_secs: f64,
    /// Per-theme multiplier on the gap that follows a step, per group.
    pub theme_time_completer: ThemeWeights,
    pub theme_time_dropout: ThemeWeights,
    /// Mean delay between the run start and a learner's first click.
    pub mean_start_delay_secs: f64,
    pub completion_threshold: CompletionThreshold,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_completers: 100,
            n_dropouts: 400,
            p_linear_completer: 0.95,
            p_linear_dropout: 0.65,
            p_forward_given_jump: 0.8,
            dropout_hazard: 0.08,
            theme_hazard: ThemeWeights {
                video: 1.3,
                article: 1.3,
                quiz: 1.0,
                discussion: 0.5,
                ..ThemeWeights::default()
            },
            mean_gap_completer_secs: 1200.0,
            mean_gap_dropout_secs: 1500.0,
            theme_time_completer: ThemeWeights::default(),
            theme_time_dropout: ThemeWeights::default(),
            mean_start_delay_secs: 12.0 * 3600.0,
            completion_threshold: CompletionThreshold::DEFAULT,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("{name} must be finite and >= 0, got {value}")]
    Negative { name: &'static str, value: f64 },
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, value) in [
            ("p_linear_completer", self.p_linear_completer),
            ("p_linear_dropout", self.p_linear_dropout),
            ("p_forward_given_jump", self.p_forward_given_jump),
            ("dropout_hazard", self.dropout_hazard),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SynthError::Probability { name, value });
            }
        }
        let scalars = [
            ("mean_gap_completer_secs", self.mean_gap_completer_secs),
            ("mean_gap_dropout_secs", self.mean_gap_dropout_secs),
            ("mean_start_delay_secs", self.mean_start_delay_secs),
        ];
        let weights = self
            .theme_hazard
            .iter()
            .map(|v| ("theme_hazard", v))
            .chain(self.theme_time_completer.iter().map(|v| ("theme_time_completer", v)))
            .chain(self.theme_time_dropout.iter().map(|v| ("theme_time_dropout", v)));
        for (name, value) in scalars.into_iter().chain(weights) {
            if !value.is_finite() || value < 0.0 {
                return Err(SynthError::Negative { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Group<'a> {
    p_linear: f64,
    mean_gap: f64,
    theme_time: &'a ThemeWeights,
    /// `None` walks the whole course; `Some(max)` stops after at most `max` visits.
    max_visits: Option<usize>,
}

/// Generates first-visit events for `n_completers + n_dropouts` learners,
/// sorted by timestamp, then learner id, then step.
pub fn generate_synthetic(config: &SynthConfig, structure: &CourseStructure) -> Result<Vec<ActivityEvent>, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = structure.len();
    // Dropouts must stay below the completion threshold.
    let dropout_cap = config.completion_threshold.min_steps(n).saturating_sub(1).max(1);

    let completers = Group {
        p_linear: config.p_linear_completer,
        mean_gap: config.mean_gap_completer_secs,
        theme_time: &config.theme_time_completer,
        max_visits: None,
    };
    let dropouts = Group {
        p_linear: config.p_linear_dropout,
        mean_gap: config.mean_gap_dropout_secs,
        theme_time: &config.theme_time_dropout,
        max_visits: Some(dropout_cap),
    };

    let mut events = Vec::new();
    for i in 0..config.n_completers {
        let id = format!("c{:05}", i + 1);
        walk(&mut rng, config, structure, completers, &id, &mut events);
    }
    for i in 0..config.n_dropouts {
        let id = format!("d{:05}", i + 1);
        walk(&mut rng, config, structure, dropouts, &id, &mut events);
    }
    events
        .sort_by(|a, b| (a.first_visited_at, &a.learner_id, a.step).cmp(&(b.first_visited_at, &b.learner_id, b.step)));
    Ok(events)
}

fn walk(
    rng: &mut ChaCha8Rng,
    config: &SynthConfig,
    structure: &CourseStructure,
    group: Group<'_>,
    learner_id: &str,
    out: &mut Vec<ActivityEvent>,
) {
    let steps = structure.steps();
    let n = steps.len();
    let last_time = structure.run_end().offset(LATE_ACCESS_GRACE_SECS);
    let mut visited = vec![false; n];
    let mut n_visited = 0;
    let mut pos = 0;
    let mut t = structure
        .run_start()
        .offset(exponential(rng, config.mean_start_delay_secs) as i64);

    loop {
        if t > last_time {
            break;
        }
        visited[pos] = true;
        n_visited += 1;
        let here = steps[pos];
        out.push(ActivityEvent {
            learner_id: learner_id.into(),
            step: here.id,
            theme: here.theme,
            first_visited_at: t,
        });

        if n_visited == n || group.max_visits.is_some_and(|m| n_visited >= m) {
            break;
        }
        if group.max_visits.is_some() {
            let hazard = (config.dropout_hazard * config.theme_hazard.get(here.theme)).min(1.0);
            if rng.random::<f64>() < hazard {
                break;
            }
        }

        pos = next_position(rng, &visited, pos, group.p_linear, config.p_forward_given_jump);
        let gap = exponential(rng, group.mean_gap * group.theme_time.get(here.theme));
        // At least one second so that the tie-break on equal timestamps never reorders a walk.
        t = t.offset((gap as i64).max(1));
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Move {
    Linear,
    Forward,
    Backward,
}

fn next_position(rng: &mut ChaCha8Rng, visited: &[bool], pos: usize, p_linear: f64, p_forward: f64) -> usize {
    let linear_ok = pos + 1 < visited.len() && !visited[pos + 1];
    let forward: Vec<usize> = (pos + 2..visited.len()).filter(|&j| !visited[j]).collect();
    let backward: Vec<usize> = (0..pos).rev().filter(|&j| !visited[j]).collect();

    let order = if rng.random::<f64>() < p_linear {
        [Move::Linear, Move::Forward, Move::Backward]
    } else if rng.random::<f64>() < p_forward {
        [Move::Forward, Move::Backward, Move::Linear]
    } else {
        [Move::Backward, Move::Forward, Move::Linear]
    };
    for m in order {
        match m {
            Move::Linear if linear_ok => return pos + 1,
            Move::Forward if !forward.is_empty() => return forward[geometric_index(rng, forward.len())],
            Move::Backward if !backward.is_empty() => return backward[geometric_index(rng, backward.len())],
            _ => {}
        }
    }
    unreachable!("walk continues only while unvisited steps remain")
}

/// Index into a candidate list ordered nearest-first: 0 with probability 1/2,
/// 1 with 1/4, and so on, truncated at `len - 1`.
fn geometric_index(rng: &mut ChaCha8Rng, len: usize) -> usize {
    let mut k = 0;
    while k + 1 < len && rng.random::<f64>() < 0.5 {
        k += 1;
    }
    k
}

fn exponential(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let u: f64 = rng.random();
    -mean * math::ln_1p(-u)
}

/// A mixed-theme course of `weeks × steps_per_week` steps, one week per seven days.
///
/// Each week follows a fixed video/article/discussion/quiz rotation; the final
/// week closes with an assignment, a peer review and a feedback view.
pub fn mixed_theme_structure(
    run_label: &str,
    weeks: u32,
    steps_per_week: u32,
    run_start: Timestamp,
) -> Result<CourseStructure, super::course::StructureError> {
    const ROTATION: [Theme; 8] = [
        Theme::Video,
        Theme::Article,
        Theme::Discussion,
        Theme::Video,
        Theme::Quiz,
        Theme::Article,
        Theme::Video,
        Theme::Quiz,
    ];
    const CLOSING: [Theme; 3] = [Theme::Assignment, Theme::Review, Theme::FeedbackView];
    let mut steps = Vec::new();
    for week in 1..=weeks {
        for s in 1..=steps_per_week {
            let mut theme = ROTATION[(s as usize - 1) % ROTATION.len()];
            let from_end = (steps_per_week - s) as usize;
            if week == weeks && steps_per_week as usize > CLOSING.len() && from_end < CLOSING.len() {
                theme = CLOSING[CLOSING.len() - 1 - from_end];
            }
            let id = StepId::new(week, s).expect("week and step start at 1");
            steps.push(CourseStep { id, theme });
        }
    }
    let run_end = run_start.offset(i64::from(weeks.max(1)) * 7 * 24 * 3600);
    CourseStructure::new(run_label, steps, run_start, run_end)
}
