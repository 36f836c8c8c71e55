//! Harmonization of AIID- and AIAAIC-shaped CSV exports onto the canonical
//! record.
//!
//! Each source row maps to a record plus a provenance entry for every public
//! canonical field, saying whether the value came from a source column, was
//! not recorded by that source, or was defaulted. Lossy steps (truncated
//! summaries, padded dates, unrecognised countries or sectors, columns with
//! no canonical counterpart) are reported as warnings, never silently.

mod coverage;
mod mapping;
mod source;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use coverage::{coverage_report, CoverageReport};
pub use mapping::{map_to_canonical, IdAllocator, Mapper, MappingOutcome, Provenance, SequentialIds};
pub use source::{parse_source_csv, SourceKind, SourceRecord, AIAAIC_FIELDS, AIID_FIELDS};

use crate::report::ValidationReport;
use crate::schema::{Field, IncidentRecord, SectorVocabulary, Validator};
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("malformed CSV: {0}")]
    Parse(String),
    #[error("header `{header}` is not a {source_kind} export column")]
    UnknownHeader { header: String, source_kind: SourceKind },
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::Parse(_) => "PARSE_ERROR",
            IngestError::UnknownHeader { .. } => "UNKNOWN_HEADER",
        }
    }
}

/// A row that could not be mapped. The import run continues past it.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{source_id}: {message}")]
pub struct MappingError {
    pub source_id: String,
    pub message: String,
}

impl MappingError {
    pub fn code(&self) -> &'static str {
        "MAPPING_ERROR"
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RecordReport {
    Mapped {
        source_id: String,
        incident_id: String,
        provenance: BTreeMap<Field, Provenance>,
        warnings: Vec<String>,
        validation: ValidationReport,
    },
    Error {
        source_id: String,
        code: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateCandidate {
    pub first: String,
    pub second: String,
    pub normalized_title: String,
    pub incident_date: String,
}

/// The JSON mapping report written alongside an import.
#[derive(Debug, Clone, Serialize)]
pub struct MappingReport {
    pub source_kind: SourceKind,
    pub per_record: Vec<RecordReport>,
    pub duplicate_candidates: Vec<DuplicateCandidate>,
    pub coverage: CoverageReport,
}

impl MappingReport {
    pub fn mapped(&self) -> usize {
        self.per_record
            .iter()
            .filter(|r| matches!(r, RecordReport::Mapped { .. }))
            .count()
    }

    pub fn errors(&self) -> usize {
        self.per_record.len() - self.mapped()
    }
}

#[derive(Debug, Clone)]
pub struct ImportRun {
    pub records: Vec<IncidentRecord>,
    pub outcomes: Vec<MappingOutcome>,
    pub report: MappingReport,
}

impl ImportRun {
    /// Canonical JSON Lines, one document per mapped record.
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for r in &self.records {
            out.extend(crate::schema::to_canonical_json(r));
            out.push(b'\n');
        }
        out
    }
}

/// Parses and maps a whole export. Per-row mapping failures are collected in
/// the report; only CSV-level problems abort.
pub fn import_csv(
    bytes: &[u8],
    kind: SourceKind,
    ids: &dyn IdAllocator,
    taxonomy: &Taxonomy,
    sectors: &SectorVocabulary,
) -> Result<ImportRun, IngestError> {
    let rows = parse_source_csv(bytes, kind)?;
    let mapper = Mapper::new(sectors);
    let validator = Validator::new(taxonomy, sectors);

    let mut outcomes = Vec::new();
    let mut per_record = Vec::new();
    let mut slots = Vec::new();
    for row in &rows {
        match mapper.map(row, ids) {
            Ok(outcome) => {
                slots.push(Some(per_record.len()));
                per_record.push(RecordReport::Mapped {
                    source_id: outcome.source_id.clone(),
                    incident_id: outcome.record.incident_id.clone(),
                    provenance: outcome.provenance.clone(),
                    warnings: outcome.warnings.clone(),
                    validation: validator.validate(&outcome.record),
                });
                outcomes.push(outcome);
            }
            Err(e) => {
                per_record.push(RecordReport::Error {
                    source_id: e.source_id.clone(),
                    code: e.code(),
                    message: e.message,
                });
            }
        }
    }

    let records: Vec<IncidentRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    let duplicates = duplicate_candidates(&records);
    for dup in &duplicates {
        for id in [&dup.first, &dup.second] {
            let other = if id == &dup.first { &dup.second } else { &dup.first };
            for report in per_record.iter_mut() {
                if let RecordReport::Mapped {
                    incident_id, warnings, ..
                } = report
                {
                    if incident_id == id {
                        warnings.push(format!("possible duplicate of {other} (same title and date)"));
                    }
                }
            }
        }
    }

    Ok(ImportRun {
        records,
        outcomes,
        report: MappingReport {
            source_kind: kind,
            per_record,
            duplicate_candidates: duplicates,
            coverage: coverage_report(kind),
        },
    })
}

fn normalize_title(title: &str) -> String {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Pairs of records with equal normalized titles and equal dates. A hint for
/// reviewers, nothing is merged.
pub fn duplicate_candidates(records: &[IncidentRecord]) -> Vec<DuplicateCandidate> {
    let mut seen: BTreeMap<(String, String), Vec<&IncidentRecord>> = BTreeMap::new();
    let mut out = Vec::new();
    for r in records {
        let title = normalize_title(&r.incident_title);
        if title.is_empty() {
            continue;
        }
        let date = r.incident_date.get(..10).unwrap_or(&r.incident_date).to_string();
        let bucket = seen.entry((title.clone(), date.clone())).or_default();
        for earlier in bucket.iter() {
            out.push(DuplicateCandidate {
                first: earlier.incident_id.clone(),
                second: r.incident_id.clone(),
                normalized_title: title.clone(),
                incident_date: date.clone(),
            });
        }
        bucket.push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn import_collects_errors_and_duplicates() {
        let csv = "Incident-id,Title,Description,Date\n\
                   1,Grid outage,S,2023-05-01\n\
                   2,GRID   outage!,S2,2023-05-01\n\
                   3,Bad date,S3,whenever\n";
        let run = import_csv(
            csv.as_bytes(),
            SourceKind::Aiid,
            &SequentialIds::default(),
            &Taxonomy::default(),
            &SectorVocabulary::default(),
        )
        .unwrap();
        assert_eq!(run.records.len(), 2);
        assert_eq!(run.report.mapped(), 2);
        assert_eq!(run.report.errors(), 1);
        assert_eq!(run.report.duplicate_candidates.len(), 1);
        assert_eq!(run.report.duplicate_candidates[0].normalized_title, "grid outage");
        let jsonl = run.to_jsonl();
        assert_eq!(jsonl.iter().filter(|b| **b == b'\n').count(), 2);
        let json = serde_json::to_value(&run.report).unwrap();
        assert_eq!(json["per_record"][2]["status"], "error");
        assert_eq!(json["per_record"][2]["code"], "MAPPING_ERROR");
        assert_eq!(json["coverage"]["derivable"], 7);
    }
}
