//! Timestamp and calendar-date helpers shared by selections and OCEL output.
//!
//! All instants are UTC with second precision and are written as
//! `YYYY-MM-DDTHH:MM:SSZ`.

use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime, SubsecRound, Utc};

const INSTANT_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

pub fn format_instant(instant: &DateTime<Utc>) -> String {
    instant.format(INSTANT_FORMAT).to_string()
}

/// Parses an ISO-8601 instant. Accepts RFC 3339 with any offset (converted to
/// UTC) and naive `YYYY-MM-DDTHH:MM:SS[.fff]`, which is taken as UTC.
pub fn parse_instant(text: &str) -> Option<DateTime<Utc>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(|naive| naive.and_utc())
}

/// Current time truncated to whole seconds.
pub fn now() -> DateTime<Utc> {
    Utc::now().trunc_subsecs(0)
}

/// Parses an ERP date cell: `YYYYMMDD` or `YYYY-MM-DD`.
pub fn parse_date(text: &str) -> Option<NaiveDate> {
    let text = text.trim();
    match text.len() {
        8 => NaiveDate::parse_from_str(text, "%Y%m%d").ok(),
        10 => NaiveDate::parse_from_str(text, "%Y-%m-%d").ok(),
        _ => None,
    }
}

/// Parses an ERP time cell: `HHMMSS` or `HH:MM:SS`.
pub fn parse_time(text: &str) -> Option<NaiveTime> {
    let text = text.trim();
    match text.len() {
        6 => NaiveTime::parse_from_str(text, "%H%M%S").ok(),
        8 => NaiveTime::parse_from_str(text, "%H:%M:%S").ok(),
        _ => None,
    }
}

pub(crate) mod serde_instant {
    use chrono::{DateTime, Utc};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_instant(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_instant(&text)
            .ok_or_else(|| de::Error::custom(format!("invalid ISO-8601 instant `{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn instants_round_trip() {
        let t = Utc.with_ymd_and_hms(2021, 3, 4, 10, 15, 0).unwrap();
        let text = format_instant(&t);
        assert_eq!(text, "2021-03-04T10:15:00Z");
        assert_eq!(parse_instant(&text), Some(t));
    }

    #[test]
    fn offsets_are_normalized() {
        let t = parse_instant("2021-03-04T12:15:00+02:00").unwrap();
        assert_eq!(format_instant(&t), "2021-03-04T10:15:00Z");
        assert!(parse_instant("2021-03-04T10:15:00").is_some());
        assert!(parse_instant("yesterday").is_none());
    }

    #[test]
    fn erp_cells() {
        assert_eq!(parse_date("20210304"), NaiveDate::from_ymd_opt(2021, 3, 4));
        assert_eq!(parse_date("2021-03-04"), NaiveDate::from_ymd_opt(2021, 3, 4));
        assert_eq!(parse_date(""), None);
        assert_eq!(parse_date("20211332"), None);
        assert_eq!(parse_time("101500"), NaiveTime::from_hms_opt(10, 15, 0));
        assert_eq!(parse_time("10:15:00"), NaiveTime::from_hms_opt(10, 15, 0));
        assert_eq!(parse_time("1015"), None);
    }
}
