//! Controlled vocabulary for classifying incidents in critical digital
//! infrastructure.
//!
//! The builtin vocabulary has five categories: incident type, affected
//! system, incident severity, cause of failure and type of harm. Example
//! texts are documentation attached to each label; they are never accepted
//! as label values. A revised vocabulary can be loaded from a JSON data file
//! with the same shape as [`Taxonomy`]'s serialization.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{ValidationReport, Violation, ViolationCode};

pub const INCIDENT_TYPE: &str = "incident_type";
pub const AFFECTED_SYSTEM: &str = "affected_system";
pub const INCIDENT_SEVERITY: &str = "incident_severity";
pub const CAUSE_OF_FAILURE: &str = "cause_of_failure";
pub const TYPE_OF_HARM: &str = "type_of_harm";

pub const BUILTIN_VERSION: &str = "1.0.0";

const BUILTIN: &[(&str, &[(&str, &str)])] = &[
    (
        INCIDENT_TYPE,
        &[
            ("Network Disruption", "Telecom network outages, power grid failures."),
            ("Service Quality Degradation", "Slower internet speeds, voltage fluctuations."),
            ("Security Breach", "Data breaches, unauthorized access."),
            ("AI Mismanagement", "Incorrect resource allocation, faulty AI decisions."),
            ("Operational Failure", "Trading system errors, logistics failures."),
            ("Predictive Maintenance Failure", "Unpredicted power outages, hardware failures."),
        ],
    ),
    (
        AFFECTED_SYSTEM,
        &[
            ("Core Network", "Failure in central telecom switches, energy grid control centers."),
            ("Edge/Access Networks", "Base station disruptions, edge server issues."),
            ("Data Transmission Systems", "Data link failures, fiber optic congestion."),
            ("Virtualized/Cloud Infrastructure", "Cloud service outages, virtual network issues."),
            ("IoT Components", "Faulty smart meters, IoT sensor failures."),
            ("Physical Infrastructure", "Security system malfunctions, HVAC failures."),
        ],
    ),
    (
        INCIDENT_SEVERITY,
        &[
            ("Critical", "Major nationwide outages, complete system failures."),
            ("High", "Significant disruptions, major service degradation."),
            ("Moderate", "Regional outages, partial service degradation."),
            ("Low", "Minor interruptions, brief service slowdowns."),
        ],
    ),
    (
        CAUSE_OF_FAILURE,
        &[
            ("AI Misconfiguration", "Misconfigured resource settings, faulty automation."),
            ("Predictive Maintenance Error", "Missed maintenance alerts, undetected failures."),
            ("Security Vulnerability", "Exploited AI weaknesses, data breach vulnerabilities."),
            ("Human-Related AI Errors", "Design flaws, oversight errors."),
        ],
    ),
    (
        TYPE_OF_HARM,
        &[
            ("Physical Harm", "Injuries from machinery failures, infrastructure damage."),
            ("Environmental Harm", "Increased emissions, environmental damage."),
            ("Property Harm", "Damage to telecom towers, power substations."),
            ("Psychological Harm", "Public anxiety from outages, distress from service disruptions."),
            ("Reputational Harm", "Loss of trust in service providers, damaged corporate credibility."),
            ("Economic Harm", "Revenue loss from outages, penalties for non-compliance."),
            ("Legal/Regulatory Harm", "Fines for GDPR breaches, regulatory sanctions."),
            ("Human Rights Harm", "Privacy violations, restricted freedoms from surveillance."),
        ],
    ),
];

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("taxonomy file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("duplicate category `{0}`")]
    DuplicateCategory(String),
    #[error("duplicate label `{label}` in category `{category}`")]
    DuplicateLabel { category: String, label: String },
    #[error("empty name or label in category `{0}`")]
    EmptyName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subcategory {
    pub label: String,
    pub examples: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Category {
    pub name: String,
    pub subcategories: Vec<Subcategory>,
}

impl Category {
    pub fn contains(&self, label: &str) -> bool {
        self.subcategories.iter().any(|s| s.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subcategories.iter().map(|s| s.label.as_str())
    }
}

/// An ordered, versioned vocabulary. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Taxonomy {
    pub version: String,
    pub categories: Vec<Category>,
}

/// The builtin vocabulary. Every call returns an equal value.
pub fn load_builtin_taxonomy() -> Taxonomy {
    Taxonomy {
        version: BUILTIN_VERSION.to_string(),
        categories: BUILTIN
            .iter()
            .map(|(name, subs)| Category {
                name: (*name).to_string(),
                subcategories: subs
                    .iter()
                    .map(|(label, examples)| Subcategory {
                        label: (*label).to_string(),
                        examples: (*examples).to_string(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

impl Default for Taxonomy {
    fn default() -> Self {
        load_builtin_taxonomy()
    }
}

impl Taxonomy {
    /// Parses a taxonomy data file and checks label uniqueness.
    pub fn from_json(bytes: &[u8]) -> Result<Self, TaxonomyError> {
        let taxonomy: Taxonomy = serde_json::from_slice(bytes)?;
        taxonomy.check()?;
        Ok(taxonomy)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("taxonomy serializes")
    }

    fn check(&self) -> Result<(), TaxonomyError> {
        let mut names = HashSet::new();
        for category in &self.categories {
            if category.name.trim().is_empty() {
                return Err(TaxonomyError::EmptyName(category.name.clone()));
            }
            if !names.insert(category.name.as_str()) {
                return Err(TaxonomyError::DuplicateCategory(category.name.clone()));
            }
            let mut labels = HashSet::new();
            for sub in &category.subcategories {
                if sub.label.trim().is_empty() {
                    return Err(TaxonomyError::EmptyName(category.name.clone()));
                }
                if !labels.insert(sub.label.as_str()) {
                    return Err(TaxonomyError::DuplicateLabel {
                        category: category.name.clone(),
                        label: sub.label.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn contains(&self, category: &str, label: &str) -> bool {
        self.category(category).is_some_and(|c| c.contains(label))
    }

    pub fn label_count(&self) -> usize {
        self.categories.iter().map(|c| c.subcategories.len()).sum()
    }
}

/// A `(category, label)` pair as used by classification requests.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaxonomyLabel {
    pub category: String,
    pub label: String,
}

impl TaxonomyLabel {
    pub fn new(category: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            category: category.into(),
            label: label.into(),
        }
    }
}

impl fmt::Display for TaxonomyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.category, self.label)
    }
}

impl FromStr for TaxonomyLabel {
    type Err = String;

    /// Parses `category:label`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (category, label) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `category:label`, got `{s}`"))?;
        Ok(TaxonomyLabel::new(category.trim(), label.trim()))
    }
}

/// One UNKNOWN_TAXONOMY_LABEL violation per pair that is not in `taxonomy`.
/// A label is only valid under its own category.
pub fn validate_labels(labels: &[TaxonomyLabel], taxonomy: &Taxonomy) -> ValidationReport {
    let violations = labels
        .iter()
        .filter(|l| !taxonomy.contains(&l.category, &l.label))
        .map(|l| {
            Violation::new(
                l.category.clone(),
                ViolationCode::UnknownTaxonomyLabel,
                format!("`{}` is not a label of category `{}`", l.label, l.category),
            )
        })
        .collect();
    ValidationReport::from_violations(violations)
}

/// Incident severity. Ordered so that `Critical > High > Moderate > Low`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeverityLevel {
    Low,
    Moderate,
    High,
    Critical,
}

impl SeverityLevel {
    /// Most severe first, matching the vocabulary order.
    pub const ALL: [SeverityLevel; 4] = [
        SeverityLevel::Critical,
        SeverityLevel::High,
        SeverityLevel::Moderate,
        SeverityLevel::Low,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SeverityLevel::Critical => "Critical",
            SeverityLevel::High => "High",
            SeverityLevel::Moderate => "Moderate",
            SeverityLevel::Low => "Low",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }
}

impl fmt::Display for SeverityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for SeverityLevel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for SeverityLevel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        SeverityLevel::from_label(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown severity `{s}`")))
    }
}

pub fn compare_severity(a: SeverityLevel, b: SeverityLevel) -> Ordering {
    a.cmp(&b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauseOfFailure {
    AiMisconfiguration,
    PredictiveMaintenanceError,
    SecurityVulnerability,
    HumanRelatedAiErrors,
}

impl CauseOfFailure {
    pub const ALL: [CauseOfFailure; 4] = [
        CauseOfFailure::AiMisconfiguration,
        CauseOfFailure::PredictiveMaintenanceError,
        CauseOfFailure::SecurityVulnerability,
        CauseOfFailure::HumanRelatedAiErrors,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CauseOfFailure::AiMisconfiguration => "AI Misconfiguration",
            CauseOfFailure::PredictiveMaintenanceError => "Predictive Maintenance Error",
            CauseOfFailure::SecurityVulnerability => "Security Vulnerability",
            CauseOfFailure::HumanRelatedAiErrors => "Human-Related AI Errors",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == label)
    }
}

/// A label proposed by [`suggest_labels`]. Advisory only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub category: String,
    pub label: String,
    pub score: u32,
}

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "at", "by", "for", "from", "in", "of", "on", "or", "the", "to", "with",
];

fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !STOPWORDS.contains(&t.as_str()))
        .collect()
}

/// Ranks labels by how many distinct query tokens occur as a prefix of a
/// token in the label name or its example text (case-insensitive). Ties are
/// broken by category order, then label order. Labels with no overlap are
/// omitted.
pub fn suggest_labels(free_text: &str, taxonomy: &Taxonomy) -> Vec<Suggestion> {
    let mut query = tokens(free_text);
    query.sort();
    query.dedup();
    if query.is_empty() {
        return Vec::new();
    }

    let mut ranked: Vec<((usize, usize), Suggestion)> = Vec::new();
    for (ci, category) in taxonomy.categories.iter().enumerate() {
        for (li, sub) in category.subcategories.iter().enumerate() {
            let mut vocabulary = tokens(&sub.label);
            vocabulary.extend(tokens(&sub.examples));
            let score = query
                .iter()
                .filter(|q| vocabulary.iter().any(|w| w.starts_with(q.as_str())))
                .count() as u32;
            if score > 0 {
                ranked.push((
                    (ci, li),
                    Suggestion {
                        category: category.name.clone(),
                        label: sub.label.clone(),
                        score,
                    },
                ));
            }
        }
    }
    ranked.sort_by(|(pos_a, a), (pos_b, b)| b.score.cmp(&a.score).then(pos_a.cmp(pos_b)));
    ranked.into_iter().map(|(_, s)| s).collect()
}

/// Label counts per category, in vocabulary order.
pub fn cardinalities(taxonomy: &Taxonomy) -> BTreeMap<String, usize> {
    taxonomy
        .categories
        .iter()
        .map(|c| (c.name.clone(), c.subcategories.len()))
        .collect()
}
