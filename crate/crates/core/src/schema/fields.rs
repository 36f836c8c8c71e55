use std::fmt;

use serde::{Serialize, Serializer};

use super::HarmKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldTier {
    Public,
    Redacted,
}

/// The 30 standardized fields, in serial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    IncidentId,
    IncidentTitle,
    IncidentSummary,
    IncidentDate,
    IncidentLocations,
    AffectedParties,
    SectorsImpacted,
    IncidentIssues,
    AiApplicationNames,
    ApplicationVersion,
    ApplicationTechnologies,
    ApplicationPurposes,
    ApplicationDeployer,
    ApplicationDeveloper,
    ApplicationTransparency,
    IncidentSeverity,
    IncidentCauses,
    Harm(HarmKind),
    IncidentLink,
    SubmitterName,
    SubmitterEmail,
    IncidentNewsSources,
    SubmitterExtraInfo,
}

impl Field {
    pub const ALL: [Field; 30] = [
        Field::IncidentId,
        Field::IncidentTitle,
        Field::IncidentSummary,
        Field::IncidentDate,
        Field::IncidentLocations,
        Field::AffectedParties,
        Field::SectorsImpacted,
        Field::IncidentIssues,
        Field::AiApplicationNames,
        Field::ApplicationVersion,
        Field::ApplicationTechnologies,
        Field::ApplicationPurposes,
        Field::ApplicationDeployer,
        Field::ApplicationDeveloper,
        Field::ApplicationTransparency,
        Field::IncidentSeverity,
        Field::IncidentCauses,
        Field::Harm(HarmKind::Physical),
        Field::Harm(HarmKind::Environmental),
        Field::Harm(HarmKind::Property),
        Field::Harm(HarmKind::Psychological),
        Field::Harm(HarmKind::Reputational),
        Field::Harm(HarmKind::Economic),
        Field::Harm(HarmKind::LegalRegulatory),
        Field::Harm(HarmKind::HumanRights),
        Field::IncidentLink,
        Field::SubmitterName,
        Field::SubmitterEmail,
        Field::IncidentNewsSources,
        Field::SubmitterExtraInfo,
    ];

    pub fn public() -> impl Iterator<Item = Field> {
        Self::ALL.into_iter().filter(|f| f.tier() == FieldTier::Public)
    }

    pub fn redacted() -> impl Iterator<Item = Field> {
        Self::ALL.into_iter().filter(|f| f.tier() == FieldTier::Redacted)
    }

    /// 1-based serial number.
    pub fn serial(self) -> u8 {
        Self::ALL.iter().position(|f| *f == self).expect("listed") as u8 + 1
    }

    pub fn tier(self) -> FieldTier {
        if self.serial() >= 27 {
            FieldTier::Redacted
        } else {
            FieldTier::Public
        }
    }

    /// Path of the field in the canonical JSON document.
    pub fn path(self) -> &'static str {
        match self {
            Field::IncidentId => "incident_id",
            Field::IncidentTitle => "incident_title",
            Field::IncidentSummary => "incident_summary",
            Field::IncidentDate => "incident_date",
            Field::IncidentLocations => "incident_locations",
            Field::AffectedParties => "affected_parties",
            Field::SectorsImpacted => "sectors_impacted",
            Field::IncidentIssues => "incident_issues",
            Field::AiApplicationNames => "ai_application_names",
            Field::ApplicationVersion => "application_version",
            Field::ApplicationTechnologies => "application_technologies",
            Field::ApplicationPurposes => "application_purposes",
            Field::ApplicationDeployer => "application_deployer",
            Field::ApplicationDeveloper => "application_developer",
            Field::ApplicationTransparency => "application_transparency",
            Field::IncidentSeverity => "incident_severity",
            Field::IncidentCauses => "incident_causes",
            Field::Harm(HarmKind::Physical) => "harms.physical",
            Field::Harm(HarmKind::Environmental) => "harms.environmental",
            Field::Harm(HarmKind::Property) => "harms.property",
            Field::Harm(HarmKind::Psychological) => "harms.psychological",
            Field::Harm(HarmKind::Reputational) => "harms.reputational",
            Field::Harm(HarmKind::Economic) => "harms.economic",
            Field::Harm(HarmKind::LegalRegulatory) => "harms.legal_regulatory",
            Field::Harm(HarmKind::HumanRights) => "harms.human_rights",
            Field::IncidentLink => "incident_link",
            Field::SubmitterName => "submitter_name",
            Field::SubmitterEmail => "submitter_email",
            Field::IncidentNewsSources => "incident_news_sources",
            Field::SubmitterExtraInfo => "submitter_extra_info",
        }
    }

    /// Human-readable name as used in the standardized field list.
    pub fn label(self) -> &'static str {
        match self {
            Field::IncidentId => "Incident ID",
            Field::IncidentTitle => "Incident title",
            Field::IncidentSummary => "Incident summary",
            Field::IncidentDate => "Incident date",
            Field::IncidentLocations => "Incident location(s)",
            Field::AffectedParties => "Affected party(ies)",
            Field::SectorsImpacted => "Sector(s) impacted",
            Field::IncidentIssues => "Incident issue(s)",
            Field::AiApplicationNames => "AI application name(s)",
            Field::ApplicationVersion => "Application version",
            Field::ApplicationTechnologies => "Application technology(ies)",
            Field::ApplicationPurposes => "Application purpose(s)",
            Field::ApplicationDeployer => "Application deployer",
            Field::ApplicationDeveloper => "Application developer",
            Field::ApplicationTransparency => "Application transparency",
            Field::IncidentSeverity => "Incident severity",
            Field::IncidentCauses => "Incident cause(s)",
            Field::Harm(HarmKind::Physical) => "Physical harm",
            Field::Harm(HarmKind::Environmental) => "Environmental harm",
            Field::Harm(HarmKind::Property) => "Property harm",
            Field::Harm(HarmKind::Psychological) => "Psychological harm",
            Field::Harm(HarmKind::Reputational) => "Reputational harm",
            Field::Harm(HarmKind::Economic) => "Economic harm",
            Field::Harm(HarmKind::LegalRegulatory) => "Legal/ regulatory harm",
            Field::Harm(HarmKind::HumanRights) => "Human rights harm",
            Field::IncidentLink => "Link to incident description/ news article",
            Field::SubmitterName => "Name of submitter",
            Field::SubmitterEmail => "Email of submitter",
            Field::IncidentNewsSources => "Incident news source(s)",
            Field::SubmitterExtraInfo => "Extra information shared by the submitter",
        }
    }

    pub fn from_path(path: &str) -> Option<Field> {
        Self::ALL.into_iter().find(|f| f.path() == path)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.path())
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.path())
    }
}
