//! Input and output file formats.

mod events;
mod structure;
mod time;

use std::io::BufRead;

pub use events::{parse_events, write_events, EventsError, ParsedEvents, RowError, EVENTS_HEADER};
pub use structure::{load_structure, structure_to_json, StructureFileError};
pub use time::{format_utc, parse_utc};

/// Reads a newline-delimited learner id list, skipping blank lines.
pub fn read_enrolled<R: BufRead>(reader: R) -> std::io::Result<Vec<String>> {
    let mut ids = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let id = line.trim();
        if !id.is_empty() {
            ids.push(id.to_owned());
        }
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enrolled_ids() {
        let ids = read_enrolled(&b"u1\n\n  u2 \r\nu3"[..]).unwrap();
        assert_eq!(ids, ["u1", "u2", "u3"]);
    }
}
