use std::fmt;

use chrono::{Datelike, FixedOffset, NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};

/// A parsed `incident_date`: a calendar date with optional time of day and
/// optional UTC offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncidentDate {
    pub date: NaiveDate,
    pub time: Option<NaiveTime>,
    pub offset: Option<FixedOffset>,
}

impl IncidentDate {
    pub fn year_month(&self) -> YearMonth {
        YearMonth {
            year: self.date.year(),
            month: self.date.month(),
        }
    }

    /// Sort key. Offsets are ignored: incidents are ordered by the local
    /// date and time recorded for them.
    pub fn sort_key(&self) -> (NaiveDate, NaiveTime) {
        (self.date, self.time.unwrap_or(NaiveTime::MIN))
    }
}

/// Parses `YYYY-MM-DD`, optionally followed by `THH:MM` or `THH:MM:SS` and
/// then optionally `Z` or `+hh:mm` / `-hh:mm`.
pub fn parse_incident_date(s: &str) -> Result<IncidentDate, String> {
    let bad = || format!("`{s}` is not an ISO 8601 date (YYYY-MM-DD[THH:MM[:SS][Z|±hh:mm]])");
    let (date_part, rest) = match s.split_once('T') {
        Some((d, r)) => (d, Some(r)),
        None => (s, None),
    };
    if !is_shape(date_part, "dddd-dd-dd") {
        return Err(bad());
    }
    let date = NaiveDate::parse_from_str(date_part, "%Y-%m-%d").map_err(|_| bad())?;
    let Some(rest) = rest else {
        return Ok(IncidentDate {
            date,
            time: None,
            offset: None,
        });
    };

    let (clock, zone) = if let Some(c) = rest.strip_suffix('Z') {
        (c, Some("Z"))
    } else if rest.len() > 6 && matches!(rest.as_bytes()[rest.len() - 6], b'+' | b'-') {
        (&rest[..rest.len() - 6], Some(&rest[rest.len() - 6..]))
    } else {
        (rest, None)
    };
    let time = if is_shape(clock, "dd:dd") {
        NaiveTime::parse_from_str(clock, "%H:%M")
    } else if is_shape(clock, "dd:dd:dd") {
        NaiveTime::parse_from_str(clock, "%H:%M:%S")
    } else {
        return Err(bad());
    }
    .map_err(|_| bad())?;

    let offset = match zone {
        None => None,
        Some("Z") => Some(FixedOffset::east_opt(0).expect("zero offset")),
        Some(z) => {
            if !is_shape(&z[1..], "dd:dd") {
                return Err(bad());
            }
            let hours: i32 = z[1..3].parse().map_err(|_| bad())?;
            let minutes: i32 = z[4..6].parse().map_err(|_| bad())?;
            if hours > 23 || minutes > 59 {
                return Err(bad());
            }
            let secs = (hours * 3600 + minutes * 60) * if z.starts_with('-') { -1 } else { 1 };
            Some(FixedOffset::east_opt(secs).ok_or_else(bad)?)
        }
    };
    Ok(IncidentDate {
        date,
        time: Some(time),
        offset,
    })
}

fn is_shape(s: &str, shape: &str) -> bool {
    s.len() == shape.len()
        && s.bytes().zip(shape.bytes()).all(|(c, p)| match p {
            b'd' => c.is_ascii_digit(),
            other => c == other,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn succ(self) -> YearMonth {
        if self.month == 12 {
            YearMonth {
                year: self.year + 1,
                month: 1,
            }
        } else {
            YearMonth {
                year: self.year,
                month: self.month + 1,
            }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl TryFrom<String> for YearMonth {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if !is_shape(&s, "dddd-dd") {
            return Err(format!("`{s}` is not YYYY-MM"));
        }
        let year = s[..4].parse().map_err(|_| format!("bad year in `{s}`"))?;
        let month: u32 = s[5..].parse().map_err(|_| format!("bad month in `{s}`"))?;
        if !(1..=12).contains(&month) {
            return Err(format!("bad month in `{s}`"));
        }
        Ok(YearMonth { year, month })
    }
}

impl From<YearMonth> for String {
    fn from(ym: YearMonth) -> String {
        ym.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        for ok in [
            "2023-05-01",
            "2024-02-29",
            "2023-05-01T10:30",
            "2023-05-01T10:30:15",
            "2023-05-01T10:30:15Z",
            "2023-05-01T10:30+05:30",
            "2023-05-01T23:59:59-08:00",
        ] {
            assert!(parse_incident_date(ok).is_ok(), "{ok}");
        }
        let d = parse_incident_date("2023-05-01T10:30+05:30").unwrap();
        assert_eq!(d.offset.unwrap().local_minus_utc(), 19800);
    }

    #[test]
    fn rejected_forms() {
        for bad in [
            "", "2023", "2023-05", "2023-5-1", "2023-02-30", "2023-13-01", "01/05/2023",
            "2023-05-01T", "2023-05-01T25:00", "2023-05-01 10:30", "2023-05-01T10:30+5:30",
            "+2023-05-01", "2023-05-01T10:30:15.5",
        ] {
            assert!(parse_incident_date(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn year_month_succ_and_parse() {
        let ym = YearMonth { year: 2023, month: 12 };
        assert_eq!(ym.succ(), YearMonth { year: 2024, month: 1 });
        assert_eq!(YearMonth::try_from("2023-02".to_string()).unwrap().to_string(), "2023-02");
        assert!(YearMonth::try_from("2023-13".to_string()).is_err());
    }
}
