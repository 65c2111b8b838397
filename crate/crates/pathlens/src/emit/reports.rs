//! Theme CSVs and the group comparison JSON.

use pathlens_core::stats::{format_p_value, GroupComparisonReport, TestMethod, TestResult};
use pathlens_core::themes::{DropoutThemeReport, ThemeOptions, ThemeTransitionMatrix};
use serde::{Deserialize, Serialize};

pub fn theme_report_csv(report: &DropoutThemeReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theme", "dropout_count", "steps_of_theme", "dropout_per_step"])
        .expect("in-memory write");
    for r in &report.records {
        let rate = r.dropout_per_step.map(|v| format!("{v:.4}")).unwrap_or_default();
        w.write_record([
            r.theme.as_str(),
            &r.dropout_count.to_string(),
            &r.steps_of_theme.to_string(),
            &rate,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Percentages of all catch-up hops; rows are source themes, columns targets.
pub fn theme_matrix_csv(matrix: &ThemeTransitionMatrix, options: ThemeOptions) -> String {
    let themes = options.themes();
    let pct = matrix.percentages();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("from\\to")
        .chain(themes.iter().map(|t| t.as_str()))
        .collect();
    w.write_record(&header).expect("in-memory write");
    for from in &themes {
        let mut row = vec![from.as_str().to_owned()];
        row.extend(themes.iter().map(|to| format!("{:.2}", pct[from.index()][to.index()])));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestDoc {
    method: TestMethod,
    n: usize,
    p: f64,
    p_display: String,
    statistic: f64,
}

impl From<&TestResult> for TestDoc {
    fn from(r: &TestResult) -> Self {
        TestDoc {
            method: r.method,
            n: r.n_effective,
            p: r.p_value,
            p_display: format_p_value(r.p_value),
            statistic: r.statistic,
        }
    }
}

impl From<TestDoc> for TestResult {
    fn from(d: TestDoc) -> Self {
        TestResult {
            method: d.method,
            statistic: d.statistic,
            p_value: d.p,
            n_effective: d.n,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComparisonDoc {
    catchup: TestDoc,
    catchup_normality: Option<TestDoc>,
    linear: TestDoc,
    linear_normality: Option<TestDoc>,
    n_steps: usize,
    run_label: String,
}

pub fn comparison_to_json(report: &GroupComparisonReport) -> String {
    let doc = ComparisonDoc {
        catchup: (&report.catchup).into(),
        catchup_normality: report.catchup_normality.as_ref().map(Into::into),
        linear: (&report.linear).into(),
        linear_normality: report.linear_normality.as_ref().map(Into::into),
        n_steps: report.n_steps,
        run_label: report.run_label.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

pub fn comparison_from_json(text: &str) -> serde_json::Result<GroupComparisonReport> {
    let doc: ComparisonDoc = serde_json::from_str(text)?;
    Ok(GroupComparisonReport {
        run_label: doc.run_label,
        linear: doc.linear.into(),
        catchup: doc.catchup.into(),
        n_steps: doc.n_steps,
        linear_normality: doc.linear_normality.map(Into::into),
        catchup_normality: doc.catchup_normality.map(Into::into),
    })
}

/// Pretty JSON with a trailing newline for any serializable value.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use pathlens_core::themes::ThemeDropout;
    use pathlens_core::Theme;

    #[test]
    fn theme_csv_layout() {
        let report = DropoutThemeReport {
            records: vec![
                ThemeDropout {
                    theme: Theme::Video,
                    dropout_count: 3,
                    steps_of_theme: 5,
                    dropout_per_step: Some(0.6),
                },
                ThemeDropout {
                    theme: Theme::Review,
                    dropout_count: 0,
                    steps_of_theme: 0,
                    dropout_per_step: None,
                },
            ],
        };
        assert_eq!(
            theme_report_csv(&report),
            "theme,dropout_count,steps_of_theme,dropout_per_step\nvideo,3,5,0.6000\nreview,0,0,\n"
        );
    }

    #[test]
    fn matrix_csv_layout() {
        let mut counts = [[0u64; Theme::COUNT]; Theme::COUNT];
        counts[Theme::Video.index()][Theme::Quiz.index()] = 2;
        counts[Theme::Quiz.index()][Theme::Video.index()] = 1;
        let csv = theme_matrix_csv(
            &ThemeTransitionMatrix { counts },
            ThemeOptions { merge_assessment: true },
        );
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "from\\to,video,article,quiz,discussion,assignment");
        assert_eq!(lines[1], "video,0.00,0.00,66.67,0.00,0.00");
        assert_eq!(lines[3], "quiz,33.33,0.00,0.00,0.00,0.00");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn comparison_round_trip() {
        let t = |p: f64| TestResult {
            method: TestMethod::WilcoxonNormalApprox,
            statistic: 12.5,
            p_value: p,
            n_effective: 40,
        };
        let report = GroupComparisonReport {
            run_label: "run 1".into(),
            linear: t(1.13e-13),
            catchup: t(2.0 / 3.0),
            n_steps: 40,
            linear_normality: None,
            catchup_normality: Some(TestResult {
                method: TestMethod::ShapiroWilk,
                statistic: 0.97,
                p_value: 0.4,
                n_effective: 40,
            }),
        };
        let text = comparison_to_json(&report);
        assert!(text.contains("\"p_display\": \"1.13E-13\""));
        assert_eq!(comparison_from_json(&text).unwrap(), report);
    }
}
