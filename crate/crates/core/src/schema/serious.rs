//! Classification against the EU AI Act notion of a "serious incident".
//!
//! The Act lists four outcomes: (a) death or serious harm to health,
//! (b) serious and irreversible disruption of critical infrastructure,
//! (c) infringement of fundamental-rights obligations, (d) serious harm to
//! property or the environment. The record has no direct notion of
//! "serious", so the severity thresholds below are a rubric that policy
//! users can retune.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{HarmKind, HarmProfile, IncidentRecord};
use crate::taxonomy::SeverityLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriousClause {
    A,
    B,
    C,
    D,
}

/// Minimum severity for each severity-gated clause. Clause (c) is not gated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriousnessRubric {
    pub health: SeverityLevel,
    pub infrastructure: SeverityLevel,
    pub property_or_environment: SeverityLevel,
}

impl SeriousnessRubric {
    pub const DEFAULT: SeriousnessRubric = SeriousnessRubric {
        health: SeverityLevel::High,
        infrastructure: SeverityLevel::Critical,
        property_or_environment: SeverityLevel::High,
    };

    pub fn classify(&self, harms: &HarmProfile, severity: Option<SeverityLevel>) -> SeriousAssessment {
        let at_least = |threshold: SeverityLevel| severity.is_some_and(|s| s >= threshold);
        let mut clauses = BTreeSet::new();
        if harms.is_present(HarmKind::Physical) && at_least(self.health) {
            clauses.insert(SeriousClause::A);
        }
        if at_least(self.infrastructure) {
            clauses.insert(SeriousClause::B);
        }
        if harms.is_present(HarmKind::HumanRights) {
            clauses.insert(SeriousClause::C);
        }
        if (harms.is_present(HarmKind::Property) || harms.is_present(HarmKind::Environmental))
            && at_least(self.property_or_environment)
        {
            clauses.insert(SeriousClause::D);
        }
        SeriousAssessment {
            serious: !clauses.is_empty(),
            clauses,
        }
    }
}

impl Default for SeriousnessRubric {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriousAssessment {
    pub serious: bool,
    pub clauses: BTreeSet<SeriousClause>,
}

/// Classifies with the default rubric. An unassessed severity is below
/// every threshold.
pub fn eu_serious_incident(record: &IncidentRecord) -> SeriousAssessment {
    SeriousnessRubric::DEFAULT.classify(&record.harms, record.severity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::test_support::valid_record;

    fn record(harms: &[HarmKind], severity: &str) -> IncidentRecord {
        let mut r = valid_record();
        r.harms = HarmProfile::default();
        for h in harms {
            r.harms.set_present(*h);
        }
        r.incident_severity = Some(severity.into());
        r
    }

    #[test]
    fn human_rights_low_is_clause_c() {
        let a = eu_serious_incident(&record(&[HarmKind::HumanRights], "Low"));
        assert!(a.serious);
        assert_eq!(a.clauses, BTreeSet::from([SeriousClause::C]));
    }

    #[test]
    fn nothing_low_is_not_serious() {
        let a = eu_serious_incident(&record(&[], "Low"));
        assert!(!a.serious);
        assert!(a.clauses.is_empty());
    }

    #[test]
    fn physical_environmental_critical_is_abd() {
        let a = eu_serious_incident(&record(&[HarmKind::Physical, HarmKind::Environmental], "Critical"));
        assert_eq!(
            a.clauses,
            BTreeSet::from([SeriousClause::A, SeriousClause::B, SeriousClause::D])
        );
    }

    #[test]
    fn missing_severity_only_allows_c() {
        let mut r = record(&HarmKind::ALL, "Critical");
        r.incident_severity = None;
        assert_eq!(eu_serious_incident(&r).clauses, BTreeSet::from([SeriousClause::C]));
    }

    #[test]
    fn clauses_serialize_lowercase() {
        let a = eu_serious_incident(&record(&[HarmKind::HumanRights], "Critical"));
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"serious":true,"clauses":["b","c"]}"#
        );
    }
}
