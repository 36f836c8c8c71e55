//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use cdi_registry::schema::{
    ApplicationTransparency, HarmEntry, HarmKind, HarmProfile, IncidentRecord, Location, TransparencyLevel,
    DEFAULT_SECTORS,
};
use proptest::collection::vec;
use proptest::option;
use proptest::prelude::*;
use proptest::sample::subsequence;

pub const SEVERITIES: [&str; 4] = ["Critical", "High", "Moderate", "Low"];
pub const CAUSES: [&str; 4] = [
    "AI Misconfiguration",
    "Predictive Maintenance Error",
    "Security Vulnerability",
    "Human-Related AI Errors",
];
pub const COUNTRIES: [&str; 8] = ["US", "GB", "DE", "IN", "JP", "BR", "ZA", "FR"];

/// Marker that public text never contains, so a redacted value found in a
/// public body can only have leaked.
pub const SECRET_MARK: &str = "~s~";

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Nonblank public text: letters, digits, punctuation, quotes and a few
/// non-ASCII characters.
pub fn text() -> impl Strategy<Value = String> {
    "[A-Za-z0-9éüß漢 .,:;'\"/()&-]{0,24}[A-Za-z0-9éü漢]".prop_map(|s| s.trim_start().to_string())
}

pub fn words(max: usize) -> impl Strategy<Value = String> {
    vec("[a-zA-Z]{1,9}", 0..=max).prop_map(|w| w.join(" "))
}

fn secret() -> impl Strategy<Value = String> {
    "[a-z0-9]{4,12}".prop_map(|s| format!("{SECRET_MARK}{s}"))
}

pub fn date() -> impl Strategy<Value = String> {
    (1990i32..=2030, 1u32..=12, 1u32..=28, option::of((0u32..24, 0u32..60)), 0usize..3).prop_map(
        |(y, m, d, time, zone)| match time {
            None => format!("{y:04}-{m:02}-{d:02}"),
            Some((h, min)) => {
                let zone = ["Z", "+05:30", ""][zone];
                format!("{y:04}-{m:02}-{d:02}T{h:02}:{min:02}:00{zone}")
            }
        },
    )
}

fn location() -> impl Strategy<Value = Location> {
    (prop::sample::select(COUNTRIES.to_vec()), option::of(text())).prop_map(|(c, region)| Location {
        country_code: c.to_string(),
        region,
    })
}

pub fn harms() -> impl Strategy<Value = HarmProfile> {
    vec((any::<bool>(), option::of(text())), 8).prop_map(|flags| {
        let mut h = HarmProfile::default();
        for (kind, (present, description)) in HarmKind::ALL.into_iter().zip(flags) {
            if present {
                *h.entry_mut(kind) = match description {
                    Some(d) => HarmEntry::described(d),
                    None => HarmEntry::present(),
                };
            }
        }
        h
    })
}

fn transparency() -> impl Strategy<Value = ApplicationTransparency> {
    (prop::sample::select(TransparencyLevel::ALL.to_vec()), option::of(text()))
        .prop_map(|(level, note)| ApplicationTransparency { level, note })
}

fn list() -> impl Strategy<Value = Vec<String>> {
    vec(text(), 0..3)
}

/// Records that pass validation, with an empty id (a submission draft).
pub fn draft() -> impl Strategy<Value = IncidentRecord> {
    let public = (
        (text(), words(40), date(), vec(location(), 0..3), list()),
        (
            subsequence(DEFAULT_SECTORS.to_vec(), 0..=3),
            list(),
            list(),
            option::of(text()),
            list(),
            list(),
        ),
        (
            option::of(text()),
            option::of(text()),
            transparency(),
            option::of(prop::sample::select(SEVERITIES.to_vec())),
            subsequence(CAUSES.to_vec(), 0..=2),
            harms(),
            option::of("[a-z]{1,10}".prop_map(|p| format!("https://example.org/{p}"))),
        ),
    );
    let redacted = (
        prop_oneof![Just(String::new()), secret()],
        prop_oneof![Just(String::new()), "[a-z]{1,8}".prop_map(|l| format!("{l}{SECRET_MARK}x@example.org"))],
        vec(secret(), 0..3),
        prop_oneof![Just(String::new()), secret()],
    );
    (public, redacted).prop_map(
        |(
            ((title, summary, date, locations, parties), (sectors, issues, apps, version, tech, purposes), (deployer, developer, transparency, severity, causes, harms, link)),
            (name, email, news, extra),
        )| IncidentRecord {
            incident_id: String::new(),
            incident_title: title,
            incident_summary: summary,
            incident_date: date,
            incident_locations: locations,
            affected_parties: parties,
            sectors_impacted: sectors.into_iter().map(String::from).collect(),
            incident_issues: issues,
            ai_application_names: apps,
            application_version: version,
            application_technologies: tech,
            application_purposes: purposes,
            application_deployer: deployer,
            application_developer: developer,
            application_transparency: transparency,
            incident_severity: severity.map(String::from),
            incident_causes: causes.into_iter().map(String::from).collect(),
            harms,
            incident_link: link,
            submitter_name: name,
            submitter_email: email,
            incident_news_sources: news,
            submitter_extra_info: extra,
        },
    )
}

/// Valid records with an allocated id.
pub fn record() -> impl Strategy<Value = IncidentRecord> {
    (draft(), 1u32..=999_999).prop_map(|(mut r, n)| {
        r.incident_id = format!("CDI-{n:06}");
        r
    })
}

/// The non-empty redacted values of a record.
pub fn redacted_values(r: &IncidentRecord) -> Vec<String> {
    let mut out = vec![r.submitter_name.clone(), r.submitter_email.clone(), r.submitter_extra_info.clone()];
    out.extend(r.incident_news_sources.iter().cloned());
    out.retain(|s| !s.is_empty());
    out
}

pub const REDACTED_NAMES: [&str; 4] = [
    "submitter_name",
    "submitter_email",
    "incident_news_sources",
    "submitter_extra_info",
];

/// A fixed valid record for workflow tests.
pub fn sample() -> IncidentRecord {
    cdi_registry::from_canonical_json(&std::fs::read(fixture("record.json")).unwrap()).unwrap()
}
