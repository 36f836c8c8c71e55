//! The canonical incident record.
//!
//! A record has 30 fields: 26 public ones (serials 1-26) and 4 submitter
//! fields (serials 27-30) that are stored but never shown to the public
//! tier. The eight harm fields (serials 18-25) are grouped under `harms` in
//! the JSON document. [`Field`] enumerates all 30 with their serial numbers,
//! document paths and access tier.
//!
//! Records are plain values. Formats (dates, country codes, ids, taxonomy
//! labels) are held as text and checked by [`validate_incident`], so a
//! malformed document still loads and yields a complete violation report.

mod date;
mod fields;
mod json;
mod redact;
mod sectors;
mod serious;
mod validate;
mod words;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use date::{parse_incident_date, IncidentDate, YearMonth};
pub use fields::{Field, FieldTier};
pub use json::{from_canonical_json, to_canonical_json, CodecError};
pub use redact::{redact, AccessTier, PublicIncident, RecordView};
pub use sectors::{SectorVocabulary, DEFAULT_SECTORS};
pub use serious::{
    eu_serious_incident, SeriousAssessment, SeriousClause, SeriousnessRubric,
};
pub use validate::{validate_incident, Validator};
pub use words::{count_words, truncate_words, MAX_SUMMARY_WORDS};

use crate::taxonomy::SeverityLevel;

/// Identifier of the form `CDI-NNNNNN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IncidentId(u32);

impl IncidentId {
    pub const PREFIX: &'static str = "CDI-";
    pub const MAX: u32 = 999_999;

    pub fn new(sequence: u32) -> Option<Self> {
        (sequence <= Self::MAX).then_some(Self(sequence))
    }

    pub fn sequence(self) -> u32 {
        self.0
    }

    pub fn next(self) -> Option<Self> {
        Self::new(self.0 + 1)
    }
}

impl fmt::Display for IncidentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:06}", Self::PREFIX, self.0)
    }
}

impl FromStr for IncidentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix(Self::PREFIX)
            .filter(|d| d.len() == 6 && d.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| format!("`{s}` is not of the form CDI-NNNNNN"))?;
        Ok(IncidentId(digits.parse().expect("six ascii digits")))
    }
}

impl Serialize for IncidentId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IncidentId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Location {
    /// ISO 3166-1 alpha-2, upper case.
    pub country_code: String,
    pub region: Option<String>,
}

impl Location {
    pub fn country(code: impl Into<String>) -> Self {
        Self {
            country_code: code.into(),
            region: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TransparencyLevel {
    High,
    Medium,
    Low,
    #[default]
    Unknown,
}

impl TransparencyLevel {
    pub const ALL: [TransparencyLevel; 4] = [
        TransparencyLevel::High,
        TransparencyLevel::Medium,
        TransparencyLevel::Low,
        TransparencyLevel::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TransparencyLevel::High => "high",
            TransparencyLevel::Medium => "medium",
            TransparencyLevel::Low => "low",
            TransparencyLevel::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ApplicationTransparency {
    pub level: TransparencyLevel,
    pub note: Option<String>,
}

/// The eight fixed harm kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmKind {
    Physical,
    Environmental,
    Property,
    Psychological,
    Reputational,
    Economic,
    LegalRegulatory,
    HumanRights,
}

impl HarmKind {
    pub const ALL: [HarmKind; 8] = [
        HarmKind::Physical,
        HarmKind::Environmental,
        HarmKind::Property,
        HarmKind::Psychological,
        HarmKind::Reputational,
        HarmKind::Economic,
        HarmKind::LegalRegulatory,
        HarmKind::HumanRights,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HarmKind::Physical => "physical",
            HarmKind::Environmental => "environmental",
            HarmKind::Property => "property",
            HarmKind::Psychological => "psychological",
            HarmKind::Reputational => "reputational",
            HarmKind::Economic => "economic",
            HarmKind::LegalRegulatory => "legal_regulatory",
            HarmKind::HumanRights => "human_rights",
        }
    }

    /// The matching `type_of_harm` taxonomy label.
    pub fn taxonomy_label(self) -> &'static str {
        match self {
            HarmKind::Physical => "Physical Harm",
            HarmKind::Environmental => "Environmental Harm",
            HarmKind::Property => "Property Harm",
            HarmKind::Psychological => "Psychological Harm",
            HarmKind::Reputational => "Reputational Harm",
            HarmKind::Economic => "Economic Harm",
            HarmKind::LegalRegulatory => "Legal/Regulatory Harm",
            HarmKind::HumanRights => "Human Rights Harm",
        }
    }

    pub fn from_taxonomy_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.taxonomy_label() == label)
    }
}

impl fmt::Display for HarmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HarmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown harm kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct HarmEntry {
    pub present: bool,
    /// Must be `None` when `present` is false.
    pub description: Option<String>,
}

impl HarmEntry {
    pub fn present() -> Self {
        Self {
            present: true,
            description: None,
        }
    }

    pub fn described(description: impl Into<String>) -> Self {
        Self {
            present: true,
            description: Some(description.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct HarmProfile {
    pub physical: HarmEntry,
    pub environmental: HarmEntry,
    pub property: HarmEntry,
    pub psychological: HarmEntry,
    pub reputational: HarmEntry,
    pub economic: HarmEntry,
    pub legal_regulatory: HarmEntry,
    pub human_rights: HarmEntry,
}

impl HarmProfile {
    pub fn entry(&self, kind: HarmKind) -> &HarmEntry {
        match kind {
            HarmKind::Physical => &self.physical,
            HarmKind::Environmental => &self.environmental,
            HarmKind::Property => &self.property,
            HarmKind::Psychological => &self.psychological,
            HarmKind::Reputational => &self.reputational,
            HarmKind::Economic => &self.economic,
            HarmKind::LegalRegulatory => &self.legal_regulatory,
            HarmKind::HumanRights => &self.human_rights,
        }
    }

    pub fn entry_mut(&mut self, kind: HarmKind) -> &mut HarmEntry {
        match kind {
            HarmKind::Physical => &mut self.physical,
            HarmKind::Environmental => &mut self.environmental,
            HarmKind::Property => &mut self.property,
            HarmKind::Psychological => &mut self.psychological,
            HarmKind::Reputational => &mut self.reputational,
            HarmKind::Economic => &mut self.economic,
            HarmKind::LegalRegulatory => &mut self.legal_regulatory,
            HarmKind::HumanRights => &mut self.human_rights,
        }
    }

    pub fn is_present(&self, kind: HarmKind) -> bool {
        self.entry(kind).present
    }

    pub fn set_present(&mut self, kind: HarmKind) {
        self.entry_mut(kind).present = true;
    }

    pub fn present_kinds(&self) -> impl Iterator<Item = HarmKind> + '_ {
        HarmKind::ALL.into_iter().filter(|k| self.is_present(*k))
    }

    pub fn any_present(&self) -> bool {
        self.present_kinds().next().is_some()
    }
}

/// The canonical incident document.
///
/// Field order here is the canonical serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct IncidentRecord {
    pub incident_id: String,
    pub incident_title: String,
    pub incident_summary: String,
    pub incident_date: String,
    pub incident_locations: Vec<Location>,
    pub affected_parties: Vec<String>,
    pub sectors_impacted: Vec<String>,
    pub incident_issues: Vec<String>,
    pub ai_application_names: Vec<String>,
    pub application_version: Option<String>,
    pub application_technologies: Vec<String>,
    pub application_purposes: Vec<String>,
    pub application_deployer: Option<String>,
    pub application_developer: Option<String>,
    pub application_transparency: ApplicationTransparency,
    /// A `incident_severity` taxonomy label, or `None` when not assessed.
    pub incident_severity: Option<String>,
    /// `cause_of_failure` taxonomy labels.
    pub incident_causes: Vec<String>,
    pub harms: HarmProfile,
    pub incident_link: Option<String>,
    pub submitter_name: String,
    pub submitter_email: String,
    pub incident_news_sources: Vec<String>,
    pub submitter_extra_info: String,
}

impl IncidentRecord {
    /// Parsed severity, if the label is one of the four levels.
    pub fn severity(&self) -> Option<SeverityLevel> {
        self.incident_severity.as_deref().and_then(SeverityLevel::from_label)
    }

    pub fn parsed_id(&self) -> Option<IncidentId> {
        self.incident_id.parse().ok()
    }

    pub fn parsed_date(&self) -> Option<IncidentDate> {
        parse_incident_date(&self.incident_date).ok()
    }

    pub fn has_redacted_content(&self) -> bool {
        !self.submitter_name.is_empty()
            || !self.submitter_email.is_empty()
            || !self.incident_news_sources.is_empty()
            || !self.submitter_extra_info.is_empty()
    }

    pub fn clear_redacted(&mut self) {
        self.submitter_name.clear();
        self.submitter_email.clear();
        self.incident_news_sources.clear();
        self.submitter_extra_info.clear();
    }
}
