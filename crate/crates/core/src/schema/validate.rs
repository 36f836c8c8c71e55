use crate::report::{ValidationReport, Violation, ViolationCode};
use crate::taxonomy::{Taxonomy, CAUSE_OF_FAILURE, INCIDENT_SEVERITY};

use super::{
    count_words, parse_incident_date, HarmKind, IncidentId, IncidentRecord, SectorVocabulary,
    MAX_SUMMARY_WORDS,
};

/// Validates records against a taxonomy and sector vocabulary.
#[derive(Debug, Clone, Copy)]
pub struct Validator<'a> {
    taxonomy: &'a Taxonomy,
    sectors: &'a SectorVocabulary,
}

/// Validates against the builtin taxonomy and default sectors.
pub fn validate_incident(record: &IncidentRecord) -> ValidationReport {
    let taxonomy = Taxonomy::default();
    let sectors = SectorVocabulary::default();
    Validator::new(&taxonomy, &sectors).validate(record)
}

impl<'a> Validator<'a> {
    pub fn new(taxonomy: &'a Taxonomy, sectors: &'a SectorVocabulary) -> Self {
        Self { taxonomy, sectors }
    }

    /// Reports every violation in `record`.
    pub fn validate(&self, record: &IncidentRecord) -> ValidationReport {
        let mut out = Vec::new();
        check_id(&record.incident_id, &mut out);
        self.check_body(record, &mut out);
        ValidationReport::from_violations(out)
    }

    /// Like [`validate`](Self::validate) but ignores `incident_id`, for
    /// submissions that have not been allocated an id yet.
    pub fn validate_draft(&self, record: &IncidentRecord) -> ValidationReport {
        let mut out = Vec::new();
        self.check_body(record, &mut out);
        ValidationReport::from_violations(out)
    }

    fn check_body(&self, r: &IncidentRecord, out: &mut Vec<Violation>) {
        if r.incident_title.trim().is_empty() {
            out.push(Violation::new(
                "incident_title",
                ViolationCode::MissingRequiredField,
                "incident_title is required",
            ));
        }

        let words = count_words(&r.incident_summary);
        if words > MAX_SUMMARY_WORDS {
            out.push(Violation::new(
                "incident_summary",
                ViolationCode::SummaryTooLong,
                format!("summary has {words} words, limit is {MAX_SUMMARY_WORDS}"),
            ));
        }

        if r.incident_date.is_empty() {
            out.push(Violation::new(
                "incident_date",
                ViolationCode::MissingRequiredField,
                "incident_date is required",
            ));
        } else if let Err(msg) = parse_incident_date(&r.incident_date) {
            out.push(Violation::new("incident_date", ViolationCode::BadDate, msg));
        }

        for (i, loc) in r.incident_locations.iter().enumerate() {
            if !is_alpha2(&loc.country_code) {
                out.push(Violation::new(
                    format!("incident_locations[{i}].country_code"),
                    ViolationCode::BadCountryCode,
                    format!("`{}` is not an ISO 3166-1 alpha-2 code", loc.country_code),
                ));
            }
            if loc.region.as_deref().is_some_and(|s| s.trim().is_empty()) {
                out.push(empty_text(format!("incident_locations[{i}].region")));
            }
        }

        for (name, list) in [
            ("affected_parties", &r.affected_parties),
            ("incident_issues", &r.incident_issues),
            ("ai_application_names", &r.ai_application_names),
            ("application_technologies", &r.application_technologies),
            ("application_purposes", &r.application_purposes),
            ("incident_news_sources", &r.incident_news_sources),
        ] {
            for (i, item) in list.iter().enumerate() {
                if item.trim().is_empty() {
                    out.push(empty_text(format!("{name}[{i}]")));
                }
            }
        }

        for (i, sector) in r.sectors_impacted.iter().enumerate() {
            if !self.sectors.contains(sector) {
                out.push(Violation::new(
                    format!("sectors_impacted[{i}]"),
                    ViolationCode::UnknownSector,
                    format!("`{sector}` is not in the sector vocabulary"),
                ));
            }
        }

        for (name, value) in [
            ("application_deployer", &r.application_deployer),
            ("application_developer", &r.application_developer),
        ] {
            if value.as_deref().is_some_and(|s| s.trim().is_empty()) {
                out.push(empty_text(name.to_string()));
            }
        }

        if let Some(severity) = &r.incident_severity {
            if !self.taxonomy.contains(INCIDENT_SEVERITY, severity) {
                out.push(unknown_label("incident_severity".into(), INCIDENT_SEVERITY, severity));
            }
        }
        for (i, cause) in r.incident_causes.iter().enumerate() {
            if !self.taxonomy.contains(CAUSE_OF_FAILURE, cause) {
                out.push(unknown_label(format!("incident_causes[{i}]"), CAUSE_OF_FAILURE, cause));
            }
        }

        for kind in HarmKind::ALL {
            let entry = r.harms.entry(kind);
            if !entry.present && entry.description.is_some() {
                out.push(Violation::new(
                    format!("harms.{kind}"),
                    ViolationCode::OrphanHarmDescription,
                    "description given for a harm marked not present",
                ));
            }
        }

        if let Some(link) = &r.incident_link {
            let ok = url::Url::parse(link)
                .map(|u| matches!(u.scheme(), "http" | "https") && u.host().is_some())
                .unwrap_or(false);
            if !ok {
                out.push(Violation::new(
                    "incident_link",
                    ViolationCode::BadUrl,
                    format!("`{link}` is not an http(s) URL"),
                ));
            }
        }

        if !r.submitter_email.is_empty() && !is_plausible_email(&r.submitter_email) {
            // The address itself stays out of the message: it is redacted data.
            out.push(Violation::new(
                "submitter_email",
                ViolationCode::BadEmail,
                "submitter_email is not an email address",
            ));
        }
    }
}

fn check_id(id: &str, out: &mut Vec<Violation>) {
    if id.is_empty() {
        out.push(Violation::new(
            "incident_id",
            ViolationCode::MissingRequiredField,
            "incident_id is required",
        ));
    } else if let Err(msg) = id.parse::<IncidentId>() {
        out.push(Violation::new("incident_id", ViolationCode::BadIdFormat, msg));
    }
}

fn empty_text(path: String) -> Violation {
    Violation::new(path, ViolationCode::EmptyText, "entry must not be blank")
}

fn unknown_label(path: String, category: &str, label: &str) -> Violation {
    Violation::new(
        path,
        ViolationCode::UnknownTaxonomyLabel,
        format!("`{label}` is not a label of category `{category}`"),
    )
}

fn is_alpha2(code: &str) -> bool {
    code.len() == 2
        && code.bytes().all(|b| b.is_ascii_uppercase())
        && celes::Country::from_alpha2(code).is_ok()
}

fn is_plausible_email(s: &str) -> bool {
    match s.split_once('@') {
        Some((local, domain)) => {
            !local.is_empty()
                && domain.contains('.')
                && !domain.starts_with('.')
                && !domain.ends_with('.')
                && !domain.contains('@')
                && !s.chars().any(char::is_whitespace)
        }
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::test_support::valid_record;
    use crate::schema::{HarmEntry, Location};

    fn words(n: usize) -> String {
        vec!["w"; n].join(" ")
    }

    #[test]
    fn valid_fixture_passes() {
        let r = valid_record();
        let report = validate_incident(&r);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn summary_boundary() {
        let mut r = valid_record();
        r.incident_summary = words(250);
        assert!(validate_incident(&r).is_valid());
        r.incident_summary = words(251);
        let report = validate_incident(&r);
        assert!(report.has("incident_summary", ViolationCode::SummaryTooLong));
        assert_eq!(report.violations().len(), 1);
    }

    #[test]
    fn orphan_harm_description() {
        let mut r = valid_record();
        r.harms.physical = HarmEntry {
            present: false,
            description: Some("injuries".into()),
        };
        let report = validate_incident(&r);
        assert!(report.has("harms.physical", ViolationCode::OrphanHarmDescription));
    }

    #[test]
    fn reports_all_violations() {
        let mut r = valid_record();
        r.incident_id = "INC-1".into();
        r.incident_title = "  ".into();
        r.incident_date = "2023-02-30".into();
        r.incident_locations.push(Location::country("XX"));
        r.incident_locations.push(Location::country("in"));
        r.sectors_impacted.push("mining".into());
        r.incident_severity = Some("Catastrophic".into());
        r.incident_causes.push("Cosmic Rays".into());
        r.incident_link = Some("ftp://example.org/x".into());
        r.submitter_email = "not-an-email".into();
        r.affected_parties.push(String::new());
        r.application_deployer = Some(String::new());
        let report = validate_incident(&r);
        let got: Vec<(&str, ViolationCode)> = report
            .violations()
            .iter()
            .map(|v| (v.field_path.as_str(), v.code))
            .collect();
        assert_eq!(
            got,
            vec![
                ("incident_id", ViolationCode::BadIdFormat),
                ("incident_title", ViolationCode::MissingRequiredField),
                ("incident_date", ViolationCode::BadDate),
                ("incident_locations[1].country_code", ViolationCode::BadCountryCode),
                ("incident_locations[2].country_code", ViolationCode::BadCountryCode),
                ("affected_parties[2]", ViolationCode::EmptyText),
                ("sectors_impacted[2]", ViolationCode::UnknownSector),
                ("application_deployer", ViolationCode::EmptyText),
                ("incident_severity", ViolationCode::UnknownTaxonomyLabel),
                ("incident_causes[1]", ViolationCode::UnknownTaxonomyLabel),
                ("incident_link", ViolationCode::BadUrl),
                ("submitter_email", ViolationCode::BadEmail),
            ]
        );
    }

    #[test]
    fn draft_ignores_id() {
        let mut r = valid_record();
        r.incident_id.clear();
        let taxonomy = Taxonomy::default();
        let sectors = SectorVocabulary::default();
        let v = Validator::new(&taxonomy, &sectors);
        assert!(v.validate_draft(&r).is_valid());
        assert!(v.validate(&r).has("incident_id", ViolationCode::MissingRequiredField));
    }

    #[test]
    fn bad_email_message_does_not_echo_address() {
        let mut r = valid_record();
        r.submitter_email = "secret-person at example".into();
        let report = validate_incident(&r);
        assert!(!report.violations()[0].message.contains("secret-person"));
    }
}
