use serde::Serialize;

use crate::schema::{Field, HarmKind};

use super::SourceKind;

/// Which source column can populate each canonical field. Fields absent from
/// a table cannot be derived from that source.
const AIID_COLUMNS: &[(Field, &str)] = &[
    (Field::IncidentId, "Incident-id"),
    (Field::IncidentTitle, "Title"),
    (Field::IncidentSummary, "Description"),
    (Field::IncidentDate, "Date"),
    (Field::AffectedParties, "Alleged harmed or nearly harmed parties"),
    (Field::ApplicationDeployer, "Alleged deployer of AI system"),
    (Field::ApplicationDeveloper, "Alleged developer of AI system"),
];

const AIAAIC_COLUMNS: &[(Field, &str)] = &[
    (Field::IncidentId, "AIAAIC ID"),
    (Field::IncidentTitle, "Headline/title"),
    (Field::IncidentDate, "Occurred"),
    (Field::IncidentLocations, "Country(ies)"),
    (Field::SectorsImpacted, "Sector(s)"),
    (Field::IncidentIssues, "Issue(s)"),
    (Field::AiApplicationNames, "System name(s)"),
    (Field::ApplicationTechnologies, "Technology(ies)"),
    (Field::ApplicationPurposes, "Purpose(s)"),
    (Field::ApplicationDeployer, "Deployer(s)"),
    (Field::ApplicationDeveloper, "Developer(s)"),
    (Field::ApplicationTransparency, "Transparency"),
    (Field::Harm(HarmKind::Physical), "External harms (Individual)"),
    (Field::Harm(HarmKind::Environmental), "External harms (Environmental)"),
    (Field::Harm(HarmKind::Reputational), "Internal harms (Strategic/reputational)"),
    (Field::Harm(HarmKind::Economic), "Internal harms (Financial)"),
    (Field::Harm(HarmKind::LegalRegulatory), "Internal harms (Legal/regulatory)"),
    (Field::IncidentLink, "Description/links"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub source_kind: SourceKind,
    pub derivable: usize,
    pub total: usize,
    pub derivable_fields: Vec<(Field, &'static str)>,
    pub missing_fields: Vec<Field>,
}

/// How many of the 26 public canonical fields a source's export can supply.
pub fn coverage_report(kind: SourceKind) -> CoverageReport {
    let table = match kind {
        SourceKind::Aiid => AIID_COLUMNS,
        SourceKind::Aiaaic => AIAAIC_COLUMNS,
    };
    let missing_fields: Vec<Field> = Field::public()
        .filter(|f| !table.iter().any(|(g, _)| g == f))
        .collect();
    CoverageReport {
        source_kind: kind,
        derivable: table.len(),
        total: Field::public().count(),
        derivable_fields: table.to_vec(),
        missing_fields,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let aiid = coverage_report(SourceKind::Aiid);
        assert_eq!((aiid.derivable, aiid.total), (7, 26));
        assert!(aiid.missing_fields.contains(&Field::IncidentSeverity));
        assert!(aiid.missing_fields.contains(&Field::IncidentCauses));
        let aiaaic = coverage_report(SourceKind::Aiaaic);
        assert_eq!((aiaaic.derivable, aiaaic.total), (18, 26));
        assert_eq!(aiaaic.missing_fields.len(), 8);
    }

    #[test]
    fn columns_are_declared_source_fields() {
        for kind in [SourceKind::Aiid, SourceKind::Aiaaic] {
            for (_, col) in coverage_report(kind).derivable_fields {
                assert!(kind.fields().contains(&col), "{col}");
            }
        }
    }
}
