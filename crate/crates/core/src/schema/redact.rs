use serde::{Deserialize, Serialize};

use super::{ApplicationTransparency, HarmProfile, IncidentRecord, Location};

/// Who is reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessTier {
    Public,
    Reviewer,
}

/// The public projection of a record: the 26 public fields and nothing
/// else. There is no representation for the submitter fields, so a public
/// view cannot reveal whether they were populated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicIncident {
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
    pub incident_severity: Option<String>,
    pub incident_causes: Vec<String>,
    pub harms: HarmProfile,
    pub incident_link: Option<String>,
}

impl From<&IncidentRecord> for PublicIncident {
    fn from(r: &IncidentRecord) -> Self {
        Self {
            incident_id: r.incident_id.clone(),
            incident_title: r.incident_title.clone(),
            incident_summary: r.incident_summary.clone(),
            incident_date: r.incident_date.clone(),
            incident_locations: r.incident_locations.clone(),
            affected_parties: r.affected_parties.clone(),
            sectors_impacted: r.sectors_impacted.clone(),
            incident_issues: r.incident_issues.clone(),
            ai_application_names: r.ai_application_names.clone(),
            application_version: r.application_version.clone(),
            application_technologies: r.application_technologies.clone(),
            application_purposes: r.application_purposes.clone(),
            application_deployer: r.application_deployer.clone(),
            application_developer: r.application_developer.clone(),
            application_transparency: r.application_transparency.clone(),
            incident_severity: r.incident_severity.clone(),
            incident_causes: r.incident_causes.clone(),
            harms: r.harms.clone(),
            incident_link: r.incident_link.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum RecordView {
    Public(PublicIncident),
    Full(IncidentRecord),
}

impl RecordView {
    pub fn incident_id(&self) -> &str {
        match self {
            RecordView::Public(p) => &p.incident_id,
            RecordView::Full(r) => &r.incident_id,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("views serialize")
    }
}

pub fn redact(record: &IncidentRecord, tier: AccessTier) -> RecordView {
    match tier {
        AccessTier::Public => RecordView::Public(PublicIncident::from(record)),
        AccessTier::Reviewer => RecordView::Full(record.clone()),
    }
}
