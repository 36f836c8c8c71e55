//! Counts over a snapshot of incident records.
//!
//! Callers decide the snapshot; the service and CLI pass published records
//! only unless a reviewer asks for pending ones too.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::schema::{HarmKind, IncidentRecord, SectorVocabulary, TransparencyLevel, YearMonth};
use crate::taxonomy::{SeverityLevel, Taxonomy, CAUSE_OF_FAILURE, INCIDENT_SEVERITY};

pub const UNSPECIFIED: &str = "unspecified";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("`{0}` is not an aggregable field")]
    BadDimension(String),
    #[error("bad filter: {0}")]
    BadFilter(String),
}

impl AnalyticsError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalyticsError::BadDimension(_) => "BAD_DIMENSION",
            AnalyticsError::BadFilter(_) => "BAD_FILTER",
        }
    }
}

/// A field incidents can be grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Severity,
    Causes,
    Sectors,
    /// Country code of each location.
    Locations,
    Transparency,
    /// Every harm kind marked present.
    Harms,
    /// `present` / `absent` for one harm kind.
    Harm(HarmKind),
    /// Year-month of the incident date.
    Month,
}

impl Dimension {
    pub const NAMES: [&'static str; 8] = [
        "incident_severity",
        "incident_causes",
        "sectors_impacted",
        "incident_locations",
        "application_transparency",
        "harms",
        "harms.<kind>",
        "incident_date",
    ];

    pub fn name(self) -> String {
        match self {
            Dimension::Severity => "incident_severity".into(),
            Dimension::Causes => "incident_causes".into(),
            Dimension::Sectors => "sectors_impacted".into(),
            Dimension::Locations => "incident_locations".into(),
            Dimension::Transparency => "application_transparency".into(),
            Dimension::Harms => "harms".into(),
            Dimension::Harm(k) => format!("harms.{}", k.as_str()),
            Dimension::Month => "incident_date".into(),
        }
    }

    /// Whether one incident can land in several cells.
    pub fn multi_valued(self) -> bool {
        matches!(
            self,
            Dimension::Causes | Dimension::Sectors | Dimension::Locations | Dimension::Harms
        )
    }

    /// Cell keys an incident contributes to, without duplicates.
    pub fn values(self, r: &IncidentRecord) -> Vec<String> {
        let mut out: Vec<String> = match self {
            Dimension::Severity => vec![r.incident_severity.clone().unwrap_or_else(|| UNSPECIFIED.into())],
            Dimension::Causes => r.incident_causes.clone(),
            Dimension::Sectors => r.sectors_impacted.clone(),
            Dimension::Locations => r.incident_locations.iter().map(|l| l.country_code.clone()).collect(),
            Dimension::Transparency => vec![r.application_transparency.level.as_str().into()],
            Dimension::Harms => r.harms.present_kinds().map(|k| k.as_str().into()).collect(),
            Dimension::Harm(k) => vec![if r.harms.is_present(k) { "present" } else { "absent" }.into()],
            Dimension::Month => r
                .parsed_date()
                .map(|d| d.year_month().to_string())
                .into_iter()
                .collect(),
        };
        if self.multi_valued() {
            let mut seen = std::collections::BTreeSet::new();
            out.retain(|v| seen.insert(v.clone()));
        }
        out
    }

    /// Checks that `value` can occur in this dimension.
    pub fn check_value(self, value: &str, taxonomy: &Taxonomy, sectors: &SectorVocabulary) -> Result<(), AnalyticsError> {
        let ok = match self {
            Dimension::Severity => value == UNSPECIFIED || taxonomy.contains(INCIDENT_SEVERITY, value),
            Dimension::Causes => taxonomy.contains(CAUSE_OF_FAILURE, value),
            Dimension::Sectors => sectors.contains(value),
            Dimension::Locations => {
                value.len() == 2
                    && value.bytes().all(|b| b.is_ascii_uppercase())
                    && celes::Country::from_alpha2(value).is_ok()
            }
            Dimension::Transparency => TransparencyLevel::ALL.iter().any(|l| l.as_str() == value),
            Dimension::Harms => value.parse::<HarmKind>().is_ok(),
            Dimension::Harm(_) => value == "present" || value == "absent",
            Dimension::Month => YearMonth::try_from(value.to_string()).is_ok(),
        };
        if ok {
            Ok(())
        } else {
            Err(AnalyticsError::BadFilter(format!("`{value}` is not a value of {}", self.name())))
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Dimension {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "incident_severity" | "severity" => Dimension::Severity,
            "incident_causes" | "causes" => Dimension::Causes,
            "sectors_impacted" | "sectors" => Dimension::Sectors,
            "incident_locations" | "locations" | "countries" => Dimension::Locations,
            "application_transparency" | "transparency" => Dimension::Transparency,
            "harms" => Dimension::Harms,
            "incident_date" | "month" => Dimension::Month,
            other => match other.strip_prefix("harms.").map(str::parse::<HarmKind>) {
                Some(Ok(k)) => Dimension::Harm(k),
                _ => return Err(AnalyticsError::BadDimension(s.to_string())),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub key: Vec<String>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregateTable {
    pub dimensions: Vec<String>,
    /// Incidents in the snapshot.
    pub incidents: u64,
    pub multi_valued: bool,
    pub note: String,
    pub cells: Vec<Cell>,
}

impl AggregateTable {
    pub fn total(&self) -> u64 {
        self.cells.iter().map(|c| c.count).sum()
    }

    pub fn get(&self, key: &[&str]) -> u64 {
        self.cells
            .iter()
            .find(|c| c.key.iter().map(String::as_str).eq(key.iter().copied()))
            .map_or(0, |c| c.count)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = self.dimensions.clone();
        header.push("count".into());
        w.write_record(&header).expect("in-memory write");
        for c in &self.cells {
            let mut row = c.key.clone();
            row.push(c.count.to_string());
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

fn note_for(multi: bool) -> String {
    if multi {
        "multi-valued: an incident is counted once per distinct value, so cells may sum to more than the incident count"
            .into()
    } else {
        "single-valued: cells sum to the incident count".into()
    }
}

// Severity cells most severe first, then everything else by key.
fn cell_rank(dim: Dimension, key: &str) -> (usize, String) {
    match dim {
        Dimension::Severity => (
            SeverityLevel::from_label(key).map_or(SeverityLevel::ALL.len(), |l| {
                SeverityLevel::ALL.iter().position(|x| *x == l).expect("in ALL")
            }),
            key.to_string(),
        ),
        _ => (0, key.to_string()),
    }
}

/// Counts incidents per value of `by`. Cells with zero count are omitted.
pub fn aggregate(records: &[IncidentRecord], by: Dimension) -> AggregateTable {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in records {
        for v in by.values(r) {
            *counts.entry(v).or_default() += 1;
        }
    }
    let mut cells: Vec<Cell> = counts
        .into_iter()
        .map(|(k, count)| Cell { key: vec![k], count })
        .collect();
    cells.sort_by_key(|c| cell_rank(by, &c.key[0]));
    AggregateTable {
        dimensions: vec![by.name()],
        incidents: records.len() as u64,
        multi_valued: by.multi_valued(),
        note: note_for(by.multi_valued()),
        cells,
    }
}

/// Parses `by` and aggregates.
pub fn aggregate_by(records: &[IncidentRecord], by: &str) -> Result<AggregateTable, AnalyticsError> {
    Ok(aggregate(records, by.parse()?))
}

/// Harm kind by severity counts. Rows follow the harm kind order, columns
/// run from Critical down to Low.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarmSeverityMatrix {
    pub counts: [[u64; 4]; 8],
}

impl HarmSeverityMatrix {
    pub fn get(&self, harm: HarmKind, severity: SeverityLevel) -> u64 {
        self.counts[harm_row(harm)][severity_col(severity)]
    }

    pub fn to_table(&self, incidents: u64) -> AggregateTable {
        let mut cells = Vec::with_capacity(32);
        for h in HarmKind::ALL {
            for s in SeverityLevel::ALL {
                cells.push(Cell {
                    key: vec![h.as_str().into(), s.label().into()],
                    count: self.get(h, s),
                });
            }
        }
        AggregateTable {
            dimensions: vec!["harms".into(), "incident_severity".into()],
            incidents,
            multi_valued: true,
            note: "an incident with k harms present counts in k cells; incidents without a severity are not counted"
                .into(),
            cells,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["harm_kind".to_string()];
        header.extend(SeverityLevel::ALL.iter().map(|s| s.label().to_string()));
        w.write_record(&header).expect("in-memory write");
        for h in HarmKind::ALL {
            let mut row = vec![h.as_str().to_string()];
            row.extend(SeverityLevel::ALL.iter().map(|s| self.get(h, *s).to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

fn harm_row(h: HarmKind) -> usize {
    HarmKind::ALL.iter().position(|x| *x == h).expect("in ALL")
}

fn severity_col(s: SeverityLevel) -> usize {
    SeverityLevel::ALL.iter().position(|x| *x == s).expect("in ALL")
}

pub fn harm_severity_matrix(records: &[IncidentRecord]) -> HarmSeverityMatrix {
    let mut counts = [[0u64; 4]; 8];
    for r in records {
        let Some(s) = r.severity() else { continue };
        for h in r.harms.present_kinds() {
            counts[harm_row(h)][severity_col(s)] += 1;
        }
    }
    HarmSeverityMatrix { counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrendPoint {
    pub month: YearMonth,
    pub count: u64,
}

/// Monthly counts of incidents whose `field` includes `value`, covering
/// every month from the earliest to the latest incident in the snapshot.
pub fn monthly_trend(
    records: &[IncidentRecord],
    field: &str,
    value: &str,
    taxonomy: &Taxonomy,
    sectors: &SectorVocabulary,
) -> Result<Vec<TrendPoint>, AnalyticsError> {
    let dim: Dimension = field.parse()?;
    if dim == Dimension::Month {
        return Err(AnalyticsError::BadDimension(format!("{field} (the trend is already by month)")));
    }
    dim.check_value(value, taxonomy, sectors)?;
    let months: Vec<YearMonth> = records
        .iter()
        .filter_map(|r| r.parsed_date().map(|d| d.year_month()))
        .collect();
    let (Some(first), Some(last)) = (months.iter().min().copied(), months.iter().max().copied()) else {
        return Ok(Vec::new());
    };
    let mut hits: BTreeMap<YearMonth, u64> = BTreeMap::new();
    for r in records {
        if let Some(d) = r.parsed_date() {
            if dim.values(r).iter().any(|v| v == value) {
                *hits.entry(d.year_month()).or_default() += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut m = first;
    while m <= last {
        out.push(TrendPoint {
            month: m,
            count: hits.get(&m).copied().unwrap_or(0),
        });
        m = m.succ();
    }
    Ok(out)
}

pub fn trend_to_csv(points: &[TrendPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["month", "count"]).expect("in-memory write");
    for p in points {
        w.write_record([p.month.to_string(), p.count.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
