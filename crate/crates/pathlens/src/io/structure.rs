//! Course structure JSON.

use std::io::Read;

use pathlens_core::ingest::{StepIdError, StructureError, UnknownTheme};
use pathlens_core::{CourseStep, CourseStructure, StepId, Theme};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::time::{format_utc, parse_utc};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    run_label: String,
    run_start: String,
    run_end: String,
    steps: Vec<StepDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    week: u32,
    step: u32,
    theme: String,
}

#[derive(Debug, Error)]
pub enum StructureFileError {
    #[error("malformed structure document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field} is not a YYYY-MM-DDThh:mm:ssZ timestamp: {value:?}")]
    Timestamp { field: &'static str, value: String },
    #[error("step #{index} ({week}.{step}): {source}")]
    Step {
        index: usize,
        week: u32,
        step: u32,
        source: StepIdError,
    },
    #[error("step #{index}: {source}")]
    Theme { index: usize, source: UnknownTheme },
    #[error("invalid structure: {0}")]
    Invalid(#[from] StructureError),
}

pub fn load_structure<R: Read>(reader: R) -> Result<CourseStructure, StructureFileError> {
    let doc: StructureDoc = serde_json::from_reader(reader)?;
    let time = |field: &'static str, value: &str| {
        parse_utc(value).ok_or_else(|| StructureFileError::Timestamp {
            field,
            value: value.to_owned(),
        })
    };
    let run_start = time("run_start", &doc.run_start)?;
    let run_end = time("run_end", &doc.run_end)?;
    let steps = doc
        .steps
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let id = StepId::new(s.week, s.step).map_err(|source| StructureFileError::Step {
                index,
                week: s.week,
                step: s.step,
                source,
            })?;
            let theme: Theme = s
                .theme
                .parse()
                .map_err(|source| StructureFileError::Theme { index, source })?;
            Ok(CourseStep { id, theme })
        })
        .collect::<Result<Vec<_>, StructureFileError>>()?;
    Ok(CourseStructure::new(&doc.run_label, steps, run_start, run_end)?)
}

pub fn structure_to_json(structure: &CourseStructure) -> String {
    let doc = StructureDoc {
        run_label: structure.run_label().to_owned(),
        run_start: format_utc(structure.run_start()),
        run_end: format_utc(structure.run_end()),
        steps: structure
            .steps()
            .iter()
            .map(|s| StepDoc {
                week: s.id.week(),
                step: s.id.step(),
                theme: s.theme.as_str().to_owned(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("structure document serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(steps: &str) -> String {
        format!(
            r#"{{"run_label": "r1", "run_start": "2017-01-02T00:00:00Z", "run_end": "2017-02-02T00:00:00Z", "steps": [{steps}]}}"#
        )
    }

    #[test]
    fn four_steps() {
        let text = doc(
            r#"{"week":1,"step":1,"theme":"video"},{"week":1,"step":2,"theme":"quiz"},
               {"week":1,"step":3,"theme":"article"},{"week":2,"step":1,"theme":"discussion"}"#,
        );
        let s = load_structure(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.theme_of(StepId::new(2, 1).unwrap()), Some(Theme::Discussion));
        let again = load_structure(structure_to_json(&s).as_bytes()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn order_and_length_errors() {
        let e =
            load_structure(doc(r#"{"week":1,"step":2,"theme":"video"},{"week":1,"step":1,"theme":"quiz"}"#).as_bytes())
                .unwrap_err();
        assert!(e.to_string().contains("steps not strictly increasing"), "{e}");
        let e = load_structure(doc("").as_bytes()).unwrap_err();
        assert!(e.to_string().contains("length >= 2 required"), "{e}");
    }

    #[test]
    fn field_errors() {
        let e =
            load_structure(doc(r#"{"week":1,"step":1,"theme":"movie"},{"week":1,"step":2,"theme":"quiz"}"#).as_bytes())
                .unwrap_err();
        assert!(matches!(e, StructureFileError::Theme { index: 0, .. }));
        let bad_time = r#"{"run_label":"r","run_start":"soon","run_end":"2017-02-02T00:00:00Z","steps":[]}"#;
        assert!(matches!(
            load_structure(bad_time.as_bytes()),
            Err(StructureFileError::Timestamp { field: "run_start", .. })
        ));
        let extra =
            r#"{"run_label":"r","run_start":"2017-01-02T00:00:00Z","run_end":"2017-02-02T00:00:00Z","steps":[],"x":1}"#;
        assert!(matches!(
            load_structure(extra.as_bytes()),
            Err(StructureFileError::Json(_))
        ));
    }
}
