use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::schema::{HarmKind, IncidentRecord, SectorVocabulary};
use crate::taxonomy::{Taxonomy, TaxonomyLabel, CAUSE_OF_FAILURE, INCIDENT_SEVERITY, TYPE_OF_HARM};

use super::state::ReviewState;
use super::StoreError;

/// Query filter. Every field is optional; present fields are conjoined.
/// `sectors` and `severity` match any listed value, `harm_kinds` and
/// `taxonomy_labels` require all listed values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryFilter {
    pub sectors: Vec<String>,
    pub severity: Vec<String>,
    pub harm_kinds: Vec<String>,
    /// Inclusive `YYYY-MM-DD` bounds on the incident date.
    pub date_from: Option<String>,
    pub date_to: Option<String>,
    /// `category:label` pairs, matched against severity, causes and
    /// present harm kinds.
    pub taxonomy_labels: Vec<String>,
    /// Case-insensitive substring over public text fields.
    pub text: Option<String>,
    /// Review states to include. Only meaningful for reviewers; public
    /// readers never see anything but published incidents.
    pub states: Vec<String>,
}

impl QueryFilter {
    pub fn is_empty(&self) -> bool {
        *self == QueryFilter::default()
    }

    /// Builds a filter from `key=value` pairs as found in a URL query
    /// string. List values are comma separated and keys may repeat.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, StoreError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut f = QueryFilter::default();
        let split = |v: &str| -> Vec<String> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        };
        for (k, v) in pairs {
            match k {
                "sector" | "sectors" => f.sectors.extend(split(v)),
                "severity" => f.severity.extend(split(v)),
                "harm" | "harm_kinds" => f.harm_kinds.extend(split(v)),
                "label" | "taxonomy_labels" => f.taxonomy_labels.extend(split(v)),
                "state" | "states" => f.states.extend(split(v)),
                "date_from" | "from" => f.date_from = Some(v.to_string()),
                "date_to" | "to" => f.date_to = Some(v.to_string()),
                "text" | "q" => f.text = Some(v.to_string()),
                other => return Err(StoreError::BadFilter(format!("unknown filter `{other}`"))),
            }
        }
        Ok(f)
    }

    /// Checks every value against the vocabularies.
    pub fn compile(&self, taxonomy: &Taxonomy, sectors: &SectorVocabulary) -> Result<CompiledFilter, StoreError> {
        let bad = |m: String| StoreError::BadFilter(m);
        for s in &self.sectors {
            if !sectors.contains(s) {
                return Err(bad(format!("unknown sector `{s}`")));
            }
        }
        for s in &self.severity {
            if !taxonomy.contains(INCIDENT_SEVERITY, s) {
                return Err(bad(format!("unknown severity `{s}`")));
            }
        }
        let harm_kinds = self
            .harm_kinds
            .iter()
            .map(|h| h.parse::<HarmKind>().map_err(|_| bad(format!("unknown harm kind `{h}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let labels = self
            .taxonomy_labels
            .iter()
            .map(|l| {
                let parsed: TaxonomyLabel = l.parse().map_err(bad)?;
                if taxonomy.contains(&parsed.category, &parsed.label) {
                    Ok(parsed)
                } else {
                    Err(bad(format!("unknown taxonomy label `{l}`")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let date = |d: &Option<String>| -> Result<Option<NaiveDate>, StoreError> {
            d.as_deref()
                .map(|s| {
                    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| bad(format!("`{s}` is not a YYYY-MM-DD date")))
                })
                .transpose()
        };
        let from = date(&self.date_from)?;
        let to = date(&self.date_to)?;
        if let (Some(a), Some(b)) = (from, to) {
            if a > b {
                return Err(bad(format!("date_from {a} is after date_to {b}")));
            }
        }
        let states = self
            .states
            .iter()
            .map(|s| {
                ReviewState::ALL
                    .into_iter()
                    .find(|st| st.as_str() == s)
                    .ok_or_else(|| bad(format!("unknown review state `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompiledFilter {
            sectors: self.sectors.iter().cloned().collect(),
            severity: self.severity.iter().cloned().collect(),
            harm_kinds,
            labels,
            from,
            to,
            text: self.text.as_deref().map(str::trim).filter(|t| !t.is_empty()).map(str::to_lowercase),
            states,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CompiledFilter {
    sectors: BTreeSet<String>,
    severity: BTreeSet<String>,
    harm_kinds: Vec<HarmKind>,
    labels: Vec<TaxonomyLabel>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    text: Option<String>,
    states: Vec<ReviewState>,
}

impl CompiledFilter {
    pub fn admits_state(&self, state: ReviewState) -> bool {
        self.states.is_empty() || self.states.contains(&state)
    }

    pub fn matches(&self, r: &IncidentRecord) -> bool {
        if !self.sectors.is_empty() && !r.sectors_impacted.iter().any(|s| self.sectors.contains(s)) {
            return false;
        }
        if !self.severity.is_empty() && !r.incident_severity.as_ref().is_some_and(|s| self.severity.contains(s)) {
            return false;
        }
        if !self.harm_kinds.iter().all(|k| r.harms.is_present(*k)) {
            return false;
        }
        if !self.labels.iter().all(|l| has_label(r, l)) {
            return false;
        }
        if self.from.is_some() || self.to.is_some() {
            let Some(d) = r.parsed_date().map(|d| d.date) else {
                return false;
            };
            if self.from.is_some_and(|f| d < f) || self.to.is_some_and(|t| d > t) {
                return false;
            }
        }
        if let Some(text) = &self.text {
            if !public_text(r).any(|t| t.to_lowercase().contains(text.as_str())) {
                return false;
            }
        }
        true
    }
}

// Labels from incident type and affected system have no record field, so
// they never match.
fn has_label(r: &IncidentRecord, l: &TaxonomyLabel) -> bool {
    match l.category.as_str() {
        INCIDENT_SEVERITY => r.incident_severity.as_deref() == Some(l.label.as_str()),
        CAUSE_OF_FAILURE => r.incident_causes.iter().any(|c| *c == l.label),
        TYPE_OF_HARM => HarmKind::from_taxonomy_label(&l.label).is_some_and(|k| r.harms.is_present(k)),
        _ => false,
    }
}

// Never the submitter fields: a public text search must not probe them.
fn public_text(r: &IncidentRecord) -> impl Iterator<Item = &str> {
    [r.incident_title.as_str(), r.incident_summary.as_str()]
        .into_iter()
        .chain(r.incident_issues.iter().map(String::as_str))
        .chain(r.ai_application_names.iter().map(String::as_str))
        .chain(r.affected_parties.iter().map(String::as_str))
        .chain(r.application_deployer.as_deref())
        .chain(r.application_developer.as_deref())
}
