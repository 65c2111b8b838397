//! Event log CSV: `learner_id,week_number,step_number,activity_theme,first_visited_at`.

use std::fmt;
use std::io::{Read, Write};

use pathlens_core::{ActivityEvent, StepId, Theme};
use thiserror::Error;

use super::time::{format_utc, parse_utc};

pub const EVENTS_HEADER: [&str; 5] = [
    "learner_id",
    "week_number",
    "step_number",
    "activity_theme",
    "first_visited_at",
];

/// A rejected data row; `line` is the 1-based line in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedEvents {
    /// Valid rows in file order.
    pub events: Vec<ActivityEvent>,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Error)]
pub enum EventsError {
    #[error("events file is empty, expected header {}", EVENTS_HEADER.join(","))]
    MissingHeader,
    #[error("unexpected header {found:?}, expected {}", EVENTS_HEADER.join(","))]
    BadHeader { found: String },
    #[error("{0}")]
    Row(RowError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Reads an event log. In strict mode the first bad row is fatal; otherwise
/// bad rows are collected and the rest returned.
pub fn parse_events<R: Read>(reader: R, strict: bool) -> Result<ParsedEvents, EventsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(EventsError::MissingHeader),
        Some(h) => h?,
    };
    if header.iter().ne(EVENTS_HEADER.iter().copied()) {
        return Err(EventsError::BadHeader {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut out = ParsedEvents::default();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match parse_row(&record) {
            Ok(event) => out.events.push(event),
            Err(message) => {
                let err = RowError { line, message };
                if strict {
                    return Err(EventsError::Row(err));
                }
                out.errors.push(err);
            }
        }
    }
    Ok(out)
}

fn parse_row(record: &csv::StringRecord) -> Result<ActivityEvent, String> {
    if record.len() != EVENTS_HEADER.len() {
        return Err(format!("expected {} fields, got {}", EVENTS_HEADER.len(), record.len()));
    }
    let learner_id = &record[0];
    if learner_id.is_empty() {
        return Err(String::from("empty learner_id"));
    }
    let number = |i: usize| -> Result<u32, String> {
        record[i]
            .parse()
            .map_err(|_| format!("bad {} {:?}", EVENTS_HEADER[i], &record[i]))
    };
    let step = StepId::new(number(1)?, number(2)?).map_err(|e| format!("bad step: {e}"))?;
    let theme: Theme = record[3].parse().map_err(|e| format!("{e}"))?;
    let first_visited_at = parse_utc(&record[4]).ok_or_else(|| format!("bad timestamp {:?}", &record[4]))?;
    Ok(ActivityEvent {
        learner_id: learner_id.to_owned(),
        step,
        theme,
        first_visited_at,
    })
}

pub fn write_events<W: Write>(writer: W, events: &[ActivityEvent]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVENTS_HEADER)?;
    for e in events {
        w.write_record([
            e.learner_id.as_str(),
            &e.step.week().to_string(),
            &e.step.step().to_string(),
            e.theme.as_str(),
            &format_utc(e.first_visited_at),
        ])?;
    }
    w.flush()?;
    Ok(())
}
