use chrono::{DateTime, NaiveDateTime};
use pathlens_core::Timestamp;

const FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

/// Parses `YYYY-MM-DDThh:mm:ssZ`.
pub fn parse_utc(s: &str) -> Option<Timestamp> {
    NaiveDateTime::parse_from_str(s, FORMAT)
        .ok()
        .map(|t| Timestamp(t.and_utc().timestamp()))
}

pub fn format_utc(t: Timestamp) -> String {
    match DateTime::from_timestamp(t.seconds(), 0) {
        Some(d) => d.format(FORMAT).to_string(),
        None => format!("@{}", t.seconds()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = parse_utc("2017-01-03T10:00:00Z").unwrap();
        assert_eq!(t, Timestamp(1_483_437_600));
        assert_eq!(format_utc(t), "2017-01-03T10:00:00Z");
    }

    #[test]
    fn rejects_other_shapes() {
        for bad in [
            "2017-01-03 10:00:00",
            "2017-01-03T10:00:00+01:00",
            "2017-13-03T10:00:00Z",
            "",
        ] {
            assert_eq!(parse_utc(bad), None, "{bad}");
        }
    }
}
