//! Where dropouts leave, by activity theme, and how they jump between themes.

use alloc::vec::Vec;

use thiserror::Error;

use crate::ingest::{CourseStructure, LearnerPath, Theme};
use crate::pathflow::{extract_transitions, PathflowError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThemesError {
    #[error("no dropout paths")]
    NoDropouts,
    #[error("no paths")]
    EmptyPathSet,
    #[error("empty theme report")]
    EmptyReport,
    #[error(transparent)]
    Path(#[from] PathflowError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ThemeOptions {
    /// Count review and feedback steps as assignment steps.
    pub merge_assessment: bool,
}

impl ThemeOptions {
    fn map(self, t: Theme) -> Theme {
        if self.merge_assessment {
            t.merge_assessment()
        } else {
            t
        }
    }

    /// Themes that can appear after mapping, in [`Theme::ALL`] order.
    pub fn themes(self) -> Vec<Theme> {
        Theme::ALL.into_iter().filter(|&t| self.map(t) == t).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThemeDropout {
    pub theme: Theme,
    pub dropout_count: u64,
    pub steps_of_theme: usize,
    /// `dropout_count / steps_of_theme`; `None` when the course has no such step.
    pub dropout_per_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropoutThemeReport {
    pub records: Vec<ThemeDropout>,
}

impl DropoutThemeReport {
    pub fn get(&self, theme: Theme) -> Option<&ThemeDropout> {
        self.records.iter().find(|r| r.theme == theme)
    }

    pub fn total(&self) -> u64 {
        self.records.iter().map(|r| r.dropout_count).sum()
    }
}

/// Counts every dropout once, under the theme of its last visited step.
pub fn dropouts_by_last_theme<'a, I>(
    dropout_paths: I,
    structure: &CourseStructure,
    options: ThemeOptions,
) -> Result<DropoutThemeReport, ThemesError>
where
    I: IntoIterator<Item = &'a LearnerPath>,
{
    let mut counts = [0u64; Theme::COUNT];
    let mut any = false;
    for path in dropout_paths {
        let Some(last) = path.last() else { continue };
        let theme = structure
            .theme_of(last.step)
            .ok_or(PathflowError::UnknownStep(last.step))?;
        counts[options.map(theme).index()] += 1;
        any = true;
    }
    if !any {
        return Err(ThemesError::NoDropouts);
    }
    let mut steps = [0usize; Theme::COUNT];
    for s in structure.steps() {
        steps[options.map(s.theme).index()] += 1;
    }
    let records = options
        .themes()
        .into_iter()
        .map(|theme| {
            let i = theme.index();
            ThemeDropout {
                theme,
                dropout_count: counts[i],
                steps_of_theme: steps[i],
                dropout_per_step: (steps[i] > 0).then(|| counts[i] as f64 / steps[i] as f64),
            }
        })
        .collect();
    Ok(DropoutThemeReport { records })
}

/// Themes with a defined per-step rate, highest first; ties by theme name.
pub fn theme_rank_report(report: &DropoutThemeReport) -> Result<Vec<Theme>, ThemesError> {
    if report.records.is_empty() {
        return Err(ThemesError::EmptyReport);
    }
    let mut ranked: Vec<(Theme, f64)> = report
        .records
        .iter()
        .filter_map(|r| r.dropout_per_step.map(|v| (r.theme, v)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.as_str().cmp(b.0.as_str())));
    Ok(ranked.into_iter().map(|(t, _)| t).collect())
}

/// Counts of catch-up hops between themes, `counts[from][to]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThemeTransitionMatrix {
    pub counts: [[u64; Theme::COUNT]; Theme::COUNT],
}

impl ThemeTransitionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn count(&self, from: Theme, to: Theme) -> u64 {
        self.counts[from.index()][to.index()]
    }

    /// Cell shares of the total in percent; all zero when the total is zero.
    pub fn percentages(&self) -> [[f64; Theme::COUNT]; Theme::COUNT] {
        let total = self.total();
        let mut out = [[0.0; Theme::COUNT]; Theme::COUNT];
        if total == 0 {
            return out;
        }
        for (row_out, row) in out.iter_mut().zip(&self.counts) {
            for (cell, &c) in row_out.iter_mut().zip(row) {
                *cell = 100.0 * c as f64 / total as f64;
            }
        }
        out
    }

    pub fn percentage(&self, from: Theme, to: Theme) -> f64 {
        self.percentages()[from.index()][to.index()]
    }
}

/// Forward and backward jumps between themes. Linear hops are ignored.
pub fn catchup_theme_matrix<'a, I>(
    paths: I,
    structure: &CourseStructure,
    options: ThemeOptions,
) -> Result<ThemeTransitionMatrix, ThemesError>
where
    I: IntoIterator<Item = &'a LearnerPath>,
{
    let mut counts = [[0u64; Theme::COUNT]; Theme::COUNT];
    let mut any = false;
    for path in paths {
        any = true;
        for t in extract_transitions(path, structure)? {
            if !t.kind.is_catch_up() {
                continue;
            }
            let theme = |s| {
                structure
                    .theme_of(s)
                    .map(|th| options.map(th))
                    .ok_or(PathflowError::UnknownStep(s))
            };
            counts[theme(t.from)?.index()][theme(t.to)?.index()] += 1;
        }
    }
    if !any {
        return Err(ThemesError::EmptyPathSet);
    }
    Ok(ThemeTransitionMatrix { counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CourseStep, StepId, Timestamp, Visit};
    use alloc::vec;

    fn sid(s: u32) -> StepId {
        StepId::new(1, s).unwrap()
    }

    // 1:V 2:A 3:V 4:Q 5:V 6:Q 7:V 8:V 9:A 10:D
    fn course() -> CourseStructure {
        use Theme::*;
        let themes = [
            Video, Article, Video, Quiz, Video, Quiz, Video, Video, Article, Discussion,
        ];
        let steps = themes
            .iter()
            .enumerate()
            .map(|(i, &theme)| CourseStep {
                id: sid(i as u32 + 1),
                theme,
            })
            .collect();
        CourseStructure::new("r", steps, Timestamp(0), Timestamp(100)).unwrap()
    }

    fn path(id: &str, steps: &[u32]) -> LearnerPath {
        let visits = steps
            .iter()
            .enumerate()
            .map(|(i, &s)| Visit {
                step: sid(s),
                theme: Theme::Video,
                at: Timestamp(i as i64),
            })
            .collect();
        LearnerPath::from_visits(id, visits).unwrap()
    }

    #[test]
    fn dropouts_counted_under_last_theme() {
        let c = course();
        let paths = [path("a", &[1]), path("b", &[1, 2, 3]), path("c", &[5]), path("q", &[4])];
        let report = dropouts_by_last_theme(&paths, &c, ThemeOptions::default()).unwrap();
        let video = report.get(Theme::Video).unwrap();
        assert_eq!(video.dropout_count, 3);
        assert_eq!(video.steps_of_theme, 5);
        assert_eq!(video.dropout_per_step, Some(0.6));
        assert_eq!(report.get(Theme::Quiz).unwrap().dropout_count, 1);
        let disc = report.get(Theme::Discussion).unwrap();
        assert_eq!((disc.dropout_count, disc.dropout_per_step), (0, Some(0.0)));
        assert_eq!(report.get(Theme::Review).unwrap().dropout_per_step, None);
        assert_eq!(report.total(), 4);
        assert_eq!(
            dropouts_by_last_theme(&[] as &[LearnerPath], &c, ThemeOptions::default()),
            Err(ThemesError::NoDropouts)
        );
    }

    #[test]
    fn merged_assessment_themes_are_folded() {
        use Theme::*;
        let steps = [Video, Assignment, Review, FeedbackView]
            .iter()
            .enumerate()
            .map(|(i, &theme)| CourseStep {
                id: sid(i as u32 + 1),
                theme,
            })
            .collect();
        let c = CourseStructure::new("r", steps, Timestamp(0), Timestamp(9)).unwrap();
        let report = dropouts_by_last_theme(
            &[path("a", &[3]), path("b", &[4])],
            &c,
            ThemeOptions { merge_assessment: true },
        )
        .unwrap();
        assert!(report.get(Review).is_none());
        let a = report.get(Assignment).unwrap();
        assert_eq!((a.dropout_count, a.steps_of_theme), (2, 3));
    }

    #[test]
    fn ranking() {
        let rec = |theme, v| ThemeDropout {
            theme,
            dropout_count: 0,
            steps_of_theme: 1,
            dropout_per_step: Some(v),
        };
        let report = DropoutThemeReport {
            records: vec![rec(Theme::Quiz, 4.7), rec(Theme::Video, 6.5), rec(Theme::Article, 4.8)],
        };
        assert_eq!(
            theme_rank_report(&report).unwrap(),
            vec![Theme::Video, Theme::Article, Theme::Quiz]
        );

        let equal = DropoutThemeReport {
            records: vec![
                rec(Theme::Video, 1.0),
                rec(Theme::Quiz, 1.0),
                rec(Theme::Discussion, 1.0),
            ],
        };
        assert_eq!(
            theme_rank_report(&equal).unwrap(),
            vec![Theme::Discussion, Theme::Quiz, Theme::Video]
        );
        let single = DropoutThemeReport {
            records: vec![rec(Theme::Quiz, 2.0)],
        };
        assert_eq!(theme_rank_report(&single).unwrap(), vec![Theme::Quiz]);
        assert_eq!(
            theme_rank_report(&DropoutThemeReport { records: vec![] }),
            Err(ThemesError::EmptyReport)
        );
    }

    #[test]
    fn single_catch_up_hop() {
        let m = catchup_theme_matrix(&[path("a", &[1, 9])], &course(), ThemeOptions::default()).unwrap();
        assert_eq!(m.count(Theme::Video, Theme::Article), 1);
        assert_eq!(m.percentage(Theme::Video, Theme::Article), 100.0);
        assert_eq!(m.total(), 1);
    }

    #[test]
    fn forty_thirty_thirty() {
        // V->V jumps: 1->3, 3->5, 5->7, 1->5. V->A: 1->9, 3->9, 7->9 (all forward).
        // Q->Q: 4->6 (forward), 6->4 (backward), 4->6 again by another learner.
        let paths = [
            path("a", &[1, 3]),
            path("b", &[3, 5]),
            path("c", &[5, 7]),
            path("d", &[1, 5]),
            path("e", &[1, 9]),
            path("f", &[3, 9]),
            path("g", &[7, 9]),
            path("h", &[4, 6]),
            path("i", &[6, 4]),
            path("j", &[4, 6]),
        ];
        let m = catchup_theme_matrix(&paths, &course(), ThemeOptions::default()).unwrap();
        assert_eq!(m.total(), 10);
        assert!((m.percentage(Theme::Video, Theme::Video) - 40.0).abs() < 1e-9);
        assert!((m.percentage(Theme::Video, Theme::Article) - 30.0).abs() < 1e-9);
        assert!((m.percentage(Theme::Quiz, Theme::Quiz) - 30.0).abs() < 1e-9);
        let sum: f64 = m.percentages().iter().flatten().sum();
        assert!((sum - 100.0).abs() < 1e-9);
    }

    #[test]
    fn all_linear_gives_zero_matrix() {
        let m = catchup_theme_matrix(&[path("a", &[1, 2, 3, 4])], &course(), ThemeOptions::default()).unwrap();
        assert_eq!(m.total(), 0);
        assert!(m.percentages().iter().flatten().all(|&p| p == 0.0));
    }
}
