//! Structured validation results shared by record and label validation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Machine-readable violation codes. This is the complete set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    MissingRequiredField,
    SummaryTooLong,
    UnknownTaxonomyLabel,
    UnknownSector,
    BadDate,
    BadCountryCode,
    BadIdFormat,
    BadUrl,
    BadEmail,
    EmptyText,
    OrphanHarmDescription,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 11] = [
        ViolationCode::MissingRequiredField,
        ViolationCode::SummaryTooLong,
        ViolationCode::UnknownTaxonomyLabel,
        ViolationCode::UnknownSector,
        ViolationCode::BadDate,
        ViolationCode::BadCountryCode,
        ViolationCode::BadIdFormat,
        ViolationCode::BadUrl,
        ViolationCode::BadEmail,
        ViolationCode::EmptyText,
        ViolationCode::OrphanHarmDescription,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::MissingRequiredField => "MISSING_REQUIRED_FIELD",
            ViolationCode::SummaryTooLong => "SUMMARY_TOO_LONG",
            ViolationCode::UnknownTaxonomyLabel => "UNKNOWN_TAXONOMY_LABEL",
            ViolationCode::UnknownSector => "UNKNOWN_SECTOR",
            ViolationCode::BadDate => "BAD_DATE",
            ViolationCode::BadCountryCode => "BAD_COUNTRY_CODE",
            ViolationCode::BadIdFormat => "BAD_ID_FORMAT",
            ViolationCode::BadUrl => "BAD_URL",
            ViolationCode::BadEmail => "BAD_EMAIL",
            ViolationCode::EmptyText => "EMPTY_TEXT",
            ViolationCode::OrphanHarmDescription => "ORPHAN_HARM_DESCRIPTION",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single field-level problem.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    /// Dotted path into the canonical document, e.g. `harms.physical` or
    /// `incident_locations[2].country_code`.
    pub field_path: String,
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    pub fn new(field_path: impl Into<String>, code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            field_path: field_path.into(),
            code,
            message: message.into(),
        }
    }
}

/// Every violation found, not just the first. `valid` is true exactly when
/// `violations` is empty; the constructor is the only way to build one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    valid: bool,
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn valid() -> Self {
        Self::from_violations(Vec::new())
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn into_violations(self) -> Vec<Violation> {
        self.violations
    }

    pub fn has_code(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn has(&self, field_path: &str, code: ViolationCode) -> bool {
        self.violations
            .iter()
            .any(|v| v.code == code && v.field_path == field_path)
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.violations.extend(other.violations);
        Self::from_violations(self.violations)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return f.write_str("valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {} {}: {}", v.code, v.field_path, v.message)?;
        }
        Ok(())
    }
}
