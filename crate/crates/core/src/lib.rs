//! Registry for AI incidents in critical digital infrastructure.
//!
//! The crate is organized around the canonical incident record:
//!
//! - [`schema`]: the 30-field record, validation, redaction, canonical JSON
//!   and the serious-incident classifier.
//! - [`taxonomy`]: the controlled vocabulary (incident type, affected system,
//!   severity, cause of failure, type of harm).
//! - [`ingestion`]: AIID- and AIAAIC-shaped CSV import with per-field provenance.
//! - [`store`]: append-only event log with the moderated review workflow.
//! - [`analytics`]: aggregates over published incidents.
//! - [`api`]: HTTP/JSON service with tiered access.
//! - [`cli`]: operator command line.

pub mod analytics;
pub mod api;
pub mod cli;
pub mod ingestion;
pub mod report;
pub mod schema;
pub mod store;
pub mod taxonomy;

pub use report::{ValidationReport, Violation, ViolationCode};
pub use schema::{
    count_words, eu_serious_incident, from_canonical_json, redact, to_canonical_json,
    validate_incident, AccessTier, IncidentId, IncidentRecord, RecordView,
};

pub use store::{QueryFilter, ReviewEvent, ReviewState, Store, StoreError};
pub use taxonomy::{load_builtin_taxonomy, SeverityLevel, Taxonomy};
