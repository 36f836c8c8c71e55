use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};

use chrono::NaiveDate;
use serde::Serialize;

use crate::schema::{
    parse_incident_date, truncate_words, ApplicationTransparency, Field, HarmEntry, HarmKind,
    IncidentId, IncidentRecord, Location, SectorVocabulary, TransparencyLevel, MAX_SUMMARY_WORDS,
};

use super::{MappingError, SourceKind, SourceRecord};

/// Where a canonical field's value came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// The source row carried the named column (even when its value could
    /// not be folded into the canonical vocabulary; see warnings).
    MappedFrom(String),
    NotRecordedBySource,
    /// A documented default was filled in.
    Default,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingOutcome {
    pub source_kind: SourceKind,
    pub source_id: String,
    pub record: IncidentRecord,
    /// One entry per public canonical field.
    pub provenance: BTreeMap<Field, Provenance>,
    pub warnings: Vec<String>,
}

impl MappingOutcome {
    pub fn mapped_count(&self) -> usize {
        self.provenance
            .values()
            .filter(|p| matches!(p, Provenance::MappedFrom(_)))
            .count()
    }
}

/// Hands out incident ids. Implementations must be safe to share between
/// threads mapping rows in parallel.
pub trait IdAllocator: Send + Sync {
    /// `None` once the id space is exhausted.
    fn allocate(&self) -> Option<IncidentId>;
}

/// Sequential ids starting from a seed.
#[derive(Debug)]
pub struct SequentialIds {
    next: AtomicU32,
}

impl SequentialIds {
    pub fn starting_at(first: u32) -> Self {
        Self {
            next: AtomicU32::new(first),
        }
    }
}

impl Default for SequentialIds {
    fn default() -> Self {
        Self::starting_at(1)
    }
}

impl IdAllocator for SequentialIds {
    fn allocate(&self) -> Option<IncidentId> {
        IncidentId::new(self.next.fetch_add(1, Ordering::SeqCst))
    }
}

/// Maps with the default sector vocabulary.
pub fn map_to_canonical(src: &SourceRecord, ids: &dyn IdAllocator) -> Result<MappingOutcome, MappingError> {
    Mapper::new(&SectorVocabulary::default()).map(src, ids)
}

pub struct Mapper<'a> {
    sectors: &'a SectorVocabulary,
}

struct Draft {
    record: IncidentRecord,
    provenance: BTreeMap<Field, Provenance>,
    warnings: Vec<String>,
}

impl Draft {
    fn new() -> Self {
        Self {
            record: IncidentRecord::default(),
            provenance: Field::public()
                .map(|f| (f, Provenance::NotRecordedBySource))
                .collect(),
            warnings: Vec::new(),
        }
    }

    fn mapped(&mut self, field: Field, column: &str) {
        self.provenance
            .insert(field, Provenance::MappedFrom(column.to_string()));
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }
}

impl<'a> Mapper<'a> {
    pub fn new(sectors: &'a SectorVocabulary) -> Self {
        Self { sectors }
    }

    pub fn map(&self, src: &SourceRecord, ids: &dyn IdAllocator) -> Result<MappingOutcome, MappingError> {
        let mut draft = Draft::new();
        match src.source_kind {
            SourceKind::Aiid => self.map_aiid(src, &mut draft)?,
            SourceKind::Aiaaic => self.map_aiaaic(src, &mut draft)?,
        }

        let id = ids.allocate().ok_or_else(|| MappingError {
            source_id: src.source_id.clone(),
            message: "incident id space exhausted".into(),
        })?;
        draft.record.incident_id = id.to_string();
        let id_column = src.source_kind.id_field();
        match src.get(id_column) {
            Some(source_id) => {
                draft.mapped(Field::IncidentId, id_column);
                draft.warn(format!("source {id_column} `{source_id}` recorded as {id}"));
            }
            None => {
                draft.provenance.insert(Field::IncidentId, Provenance::Default);
            }
        }

        Ok(MappingOutcome {
            source_kind: src.source_kind,
            source_id: src.source_id.clone(),
            record: draft.record,
            provenance: draft.provenance,
            warnings: draft.warnings,
        })
    }

    fn map_aiid(&self, src: &SourceRecord, d: &mut Draft) -> Result<(), MappingError> {
        let date = src.get("Date");
        let (date, date_warning) = fold_date(date.unwrap_or("")).map_err(|m| MappingError {
            source_id: src.source_id.clone(),
            message: format!("Date: {m}"),
        })?;
        d.record.incident_date = date;
        d.mapped(Field::IncidentDate, "Date");
        if let Some(w) = date_warning {
            d.warn(format!("Date: {w}"));
        }

        if let Some(title) = src.get("Title") {
            d.record.incident_title = title.to_string();
            d.mapped(Field::IncidentTitle, "Title");
        }
        if let Some(description) = src.get("Description") {
            d.record.incident_summary = match truncate_words(description, MAX_SUMMARY_WORDS) {
                Some(cut) => {
                    d.warn(format!(
                        "Description: truncated from {} to {MAX_SUMMARY_WORDS} words",
                        crate::schema::count_words(description)
                    ));
                    cut.to_string()
                }
                None => description.to_string(),
            };
            d.mapped(Field::IncidentSummary, "Description");
        }
        if let Some(v) = src.get("Alleged deployer of AI system") {
            d.record.application_deployer = Some(v.to_string());
            d.mapped(Field::ApplicationDeployer, "Alleged deployer of AI system");
        }
        if let Some(v) = src.get("Alleged developer of AI system") {
            d.record.application_developer = Some(v.to_string());
            d.mapped(Field::ApplicationDeveloper, "Alleged developer of AI system");
        }
        if let Some(v) = src.get("Alleged harmed or nearly harmed parties") {
            d.record.affected_parties = split_list(v);
            d.mapped(Field::AffectedParties, "Alleged harmed or nearly harmed parties");
        }
        d.provenance
            .insert(Field::ApplicationTransparency, Provenance::Default);
        Ok(())
    }

    fn map_aiaaic(&self, src: &SourceRecord, d: &mut Draft) -> Result<(), MappingError> {
        let (column, raw_date) = match (src.get("Occurred"), src.get("Released")) {
            (Some(v), _) => ("Occurred", v),
            (None, Some(v)) => {
                d.warn("Occurred is empty; incident_date taken from Released");
                ("Released", v)
            }
            (None, None) => ("Occurred", ""),
        };
        let (date, date_warning) = fold_date(raw_date).map_err(|m| MappingError {
            source_id: src.source_id.clone(),
            message: format!("{column}: {m}"),
        })?;
        d.record.incident_date = date;
        d.mapped(Field::IncidentDate, column);
        if let Some(w) = date_warning {
            d.warn(format!("{column}: {w}"));
        }

        if let Some(title) = src.get("Headline/title") {
            d.record.incident_title = title.to_string();
            d.mapped(Field::IncidentTitle, "Headline/title");
        }

        if let Some(v) = src.get("Country(ies)") {
            for name in split_list(v) {
                match fold_country(&name) {
                    Some(code) => {
                        let loc = Location::country(code);
                        if !d.record.incident_locations.contains(&loc) {
                            d.record.incident_locations.push(loc);
                        }
                    }
                    None => d.warn(format!("Country(ies): `{name}` is not a recognised country; dropped")),
                }
            }
            d.mapped(Field::IncidentLocations, "Country(ies)");
        }

        if let Some(v) = src.get("Sector(s)") {
            for name in split_list(v) {
                match self.sectors.fold(&name) {
                    Some(sector) => {
                        if !d.record.sectors_impacted.contains(&sector) {
                            d.record.sectors_impacted.push(sector);
                        }
                    }
                    None => d.warn(format!("Sector(s): `{name}` is outside the sector vocabulary; dropped")),
                }
            }
            d.mapped(Field::SectorsImpacted, "Sector(s)");
        }

        for (column, field) in [
            ("Issue(s)", Field::IncidentIssues),
            ("System name(s)", Field::AiApplicationNames),
            ("Technology(ies)", Field::ApplicationTechnologies),
            ("Purpose(s)", Field::ApplicationPurposes),
        ] {
            if let Some(v) = src.get(column) {
                let list = split_list(v);
                match field {
                    Field::IncidentIssues => d.record.incident_issues = list,
                    Field::AiApplicationNames => d.record.ai_application_names = list,
                    Field::ApplicationTechnologies => d.record.application_technologies = list,
                    _ => d.record.application_purposes = list,
                }
                d.mapped(field, column);
            }
        }

        if let Some(v) = src.get("Deployer(s)") {
            d.record.application_deployer = Some(v.to_string());
            d.mapped(Field::ApplicationDeployer, "Deployer(s)");
        }
        if let Some(v) = src.get("Developer(s)") {
            d.record.application_developer = Some(v.to_string());
            d.mapped(Field::ApplicationDeveloper, "Developer(s)");
        }

        match src.get("Transparency") {
            Some(v) => {
                let folded = fold_transparency(v);
                if folded.level == TransparencyLevel::Unknown {
                    d.warn(format!("Transparency: `{v}` has no level; recorded as unknown with note"));
                }
                d.record.application_transparency = folded;
                d.mapped(Field::ApplicationTransparency, "Transparency");
            }
            None => {
                d.provenance
                    .insert(Field::ApplicationTransparency, Provenance::Default);
            }
        }

        for (column, kind) in [
            ("External harms (Individual)", HarmKind::Physical),
            ("External harms (Environmental)", HarmKind::Environmental),
            ("Internal harms (Strategic/reputational)", HarmKind::Reputational),
            ("Internal harms (Financial)", HarmKind::Economic),
            ("Internal harms (Legal/regulatory)", HarmKind::LegalRegulatory),
        ] {
            if let Some(v) = src.get(column) {
                *d.record.harms.entry_mut(kind) = fold_harm(v);
                d.mapped(Field::Harm(kind), column);
            }
        }

        if let Some(v) = src.get("Description/links") {
            match first_url(v) {
                Some(url) => d.record.incident_link = Some(url),
                None => d.warn("Description/links: no http(s) URL found"),
            }
            d.mapped(Field::IncidentLink, "Description/links");
        }

        for column in [
            "Type",
            "Media trigger(s)",
            "External harms (Societal)",
            "Internal harms (Operational)",
        ] {
            if let Some(v) = src.get(column) {
                d.warn(format!("{column} has no canonical field: `{v}`"));
            }
        }
        Ok(())
    }
}

/// Accepts canonical dates as-is; pads `YYYY`, `YYYY-MM` and `Month YYYY`
/// to the first day with a warning.
pub(crate) fn fold_date(raw: &str) -> Result<(String, Option<String>), String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err("missing date".into());
    }
    if parse_incident_date(raw).is_ok() {
        return Ok((raw.to_string(), None));
    }
    if let Some((d, t)) = raw.split_once(' ') {
        let candidate = format!("{d}T{t}");
        if parse_incident_date(&candidate).is_ok() {
            return Ok((candidate, None));
        }
    }
    let padded = |date: NaiveDate, precision: &str| {
        let s = date.format("%Y-%m-%d").to_string();
        Ok((s.clone(), Some(format!("`{raw}` has {precision} precision; recorded as {s}"))))
    };
    if raw.len() == 4 && raw.bytes().all(|b| b.is_ascii_digit()) {
        if let Some(date) = NaiveDate::from_ymd_opt(raw.parse().expect("digits"), 1, 1) {
            return padded(date, "year");
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(&format!("{raw}-01"), "%Y-%m-%d") {
        if raw.len() == 7 {
            return padded(date, "month");
        }
    }
    for fmt in ["%d %B %Y", "%d %b %Y"] {
        if let Ok(date) = NaiveDate::parse_from_str(&format!("1 {raw}"), fmt) {
            return padded(date, "month");
        }
    }
    Err(format!("unparseable date `{raw}`"))
}

/// Semicolon-separated if any semicolon is present, otherwise comma-separated.
pub(crate) fn split_list(raw: &str) -> Vec<String> {
    let sep = if raw.contains(';') { ';' } else { ',' };
    raw.split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

pub(crate) fn fold_country(name: &str) -> Option<String> {
    let key: String = name
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect::<String>()
        .to_lowercase();
    let key = match key.as_str() {
        "uk" | "britain" | "greatbritain" | "england" | "scotland" | "wales" => "gb",
        "usa" | "us" | "america" => "us",
        "southkorea" | "korea" => "kr",
        other => other,
    };
    key.parse::<celes::Country>()
        .ok()
        .or_else(|| celes::Country::from_alias(key).ok())
        .map(|c| c.alpha2.to_string())
}

fn fold_transparency(raw: &str) -> ApplicationTransparency {
    let lower = raw.trim().to_lowercase();
    for level in [TransparencyLevel::High, TransparencyLevel::Medium, TransparencyLevel::Low] {
        let name = level.as_str();
        if lower == name {
            return ApplicationTransparency { level, note: None };
        }
        if lower
            .strip_prefix(name)
            .is_some_and(|rest| rest.starts_with(|c: char| !c.is_alphanumeric()))
        {
            return ApplicationTransparency {
                level,
                note: Some(raw.trim().to_string()),
            };
        }
    }
    ApplicationTransparency {
        level: TransparencyLevel::Unknown,
        note: Some(raw.trim().to_string()),
    }
}

fn fold_harm(raw: &str) -> HarmEntry {
    match raw.trim().to_lowercase().as_str() {
        "yes" | "y" | "true" | "1" | "x" => HarmEntry::present(),
        "no" | "n" | "false" | "0" | "none" | "-" => HarmEntry::default(),
        _ => HarmEntry::described(raw.trim()),
    }
}

fn first_url(text: &str) -> Option<String> {
    text.split(|c: char| c.is_whitespace() || c == ';' || c == ',')
        .map(|t| t.trim_matches(|c: char| matches!(c, '(' | ')' | '<' | '>' | '"' | '\'')))
        .find(|t| {
            url::Url::parse(t)
                .map(|u| matches!(u.scheme(), "http" | "https") && u.host().is_some())
                .unwrap_or(false)
        })
        .map(str::to_string)
}
