use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::schema::{IncidentId, IncidentRecord};

use super::log::LogEvent;
use super::StoreError;

/// Moderation state. `Published` and `Rejected` are terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewState {
    Submitted,
    UnderReview,
    Published,
    Rejected,
}

impl ReviewState {
    pub const ALL: [ReviewState; 4] = [
        ReviewState::Submitted,
        ReviewState::UnderReview,
        ReviewState::Published,
        ReviewState::Rejected,
    ];

    /// The only legal moves: submitted -claim-> under_review,
    /// under_review -approve-> published, under_review -reject-> rejected.
    pub fn after(self, action: ReviewAction) -> Option<ReviewState> {
        match (self, action) {
            (ReviewState::Submitted, ReviewAction::Claim) => Some(ReviewState::UnderReview),
            (ReviewState::UnderReview, ReviewAction::Approve) => Some(ReviewState::Published),
            (ReviewState::UnderReview, ReviewAction::Reject) => Some(ReviewState::Rejected),
            _ => None,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, ReviewState::Published | ReviewState::Rejected)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReviewState::Submitted => "submitted",
            ReviewState::UnderReview => "under_review",
            ReviewState::Published => "published",
            ReviewState::Rejected => "rejected",
        }
    }
}

impl fmt::Display for ReviewState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewAction {
    Claim,
    Approve,
    Reject,
}

impl ReviewAction {
    pub const ALL: [ReviewAction; 3] = [ReviewAction::Claim, ReviewAction::Approve, ReviewAction::Reject];

    pub fn as_str(self) -> &'static str {
        match self {
            ReviewAction::Claim => "claim",
            ReviewAction::Approve => "approve",
            ReviewAction::Reject => "reject",
        }
    }
}

impl fmt::Display for ReviewAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReviewAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown review action `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewEvent {
    pub incident_id: IncidentId,
    pub action: ReviewAction,
    pub reviewer_id: String,
    /// Required and nonblank for `reject`.
    pub reason: Option<String>,
    pub timestamp: DateTime<Utc>,
}

impl ReviewEvent {
    pub fn new(incident_id: IncidentId, action: ReviewAction, reviewer_id: impl Into<String>) -> Self {
        Self {
            incident_id,
            action,
            reviewer_id: reviewer_id.into(),
            reason: None,
            timestamp: Utc::now(),
        }
    }

    pub fn claim(incident_id: IncidentId, reviewer_id: impl Into<String>) -> Self {
        Self::new(incident_id, ReviewAction::Claim, reviewer_id)
    }

    pub fn approve(incident_id: IncidentId, reviewer_id: impl Into<String>) -> Self {
        Self::new(incident_id, ReviewAction::Approve, reviewer_id)
    }

    pub fn reject(incident_id: IncidentId, reviewer_id: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::new(incident_id, ReviewAction::Reject, reviewer_id).with_reason(reason)
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn at(mut self, timestamp: DateTime<Utc>) -> Self {
        self.timestamp = timestamp;
        self
    }
}

/// A superseded version of a published record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Revision {
    pub revised_at: DateTime<Utc>,
    pub reviewer_id: String,
    pub previous: IncidentRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub record: IncidentRecord,
    pub state: ReviewState,
    pub submitted_at: DateTime<Utc>,
    pub history: Vec<ReviewEvent>,
    pub revisions: Vec<Revision>,
}

impl Entry {
    pub fn rejection_reason(&self) -> Option<&str> {
        if self.state != ReviewState::Rejected {
            return None;
        }
        self.history
            .iter()
            .rev()
            .find(|e| e.action == ReviewAction::Reject)
            .and_then(|e| e.reason.as_deref())
    }
}

/// Current state derived from the event log.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    pub entries: BTreeMap<IncidentId, Entry>,
    pub last_id: Option<IncidentId>,
    /// Number of log events folded in.
    pub events: u64,
    /// Byte length of the log prefix folded in.
    pub log_offset: u64,
}

impl Index {
    pub fn next_id(&self) -> Result<IncidentId, StoreError> {
        match self.last_id {
            None => Ok(IncidentId::new(1).expect("1 is in range")),
            Some(id) => id.next().ok_or(StoreError::IdsExhausted),
        }
    }

    /// Checks that `event` is legal against the current state without
    /// changing anything.
    pub fn check(&self, event: &LogEvent) -> Result<(), StoreError> {
        match event {
            LogEvent::Submitted { incident_id, .. } => {
                if self.last_id.is_some_and(|last| *incident_id <= last) {
                    return Err(StoreError::Corrupt(format!(
                        "id {incident_id} is not above the last allocated id"
                    )));
                }
                Ok(())
            }
            LogEvent::Reviewed { event, .. } => {
                let entry = self.entry(event.incident_id)?;
                if entry.state.after(event.action).is_none() {
                    return Err(StoreError::IllegalTransition {
                        incident_id: event.incident_id,
                        from: entry.state,
                        action: event.action,
                    });
                }
                if event.action == ReviewAction::Reject
                    && event.reason.as_deref().is_none_or(|r| r.trim().is_empty())
                {
                    return Err(StoreError::MissingReason);
                }
                Ok(())
            }
            LogEvent::Revised { incident_id, .. } => {
                let entry = self.entry(*incident_id)?;
                if entry.state != ReviewState::Published {
                    return Err(StoreError::NotPublished(*incident_id));
                }
                Ok(())
            }
        }
    }

    /// Folds a checked event in.
    pub fn apply(&mut self, event: LogEvent, line_len: u64) -> Result<(), StoreError> {
        self.check(&event)?;
        match event {
            LogEvent::Submitted {
                incident_id,
                at,
                record,
                ..
            } => {
                self.entries.insert(
                    incident_id,
                    Entry {
                        record,
                        state: ReviewState::Submitted,
                        submitted_at: at,
                        history: Vec::new(),
                        revisions: Vec::new(),
                    },
                );
                self.last_id = Some(incident_id);
            }
            LogEvent::Reviewed { event, .. } => {
                let entry = self.entries.get_mut(&event.incident_id).expect("checked");
                entry.state = entry.state.after(event.action).expect("checked");
                entry.history.push(event);
            }
            LogEvent::Revised {
                incident_id,
                at,
                reviewer_id,
                record,
                ..
            } => {
                let entry = self.entries.get_mut(&incident_id).expect("checked");
                let previous = std::mem::replace(&mut entry.record, record);
                entry.revisions.push(Revision {
                    revised_at: at,
                    reviewer_id,
                    previous,
                });
            }
        }
        self.events += 1;
        self.log_offset += line_len;
        Ok(())
    }

    pub fn entry(&self, id: IncidentId) -> Result<&Entry, StoreError> {
        self.entries
            .get(&id)
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }
}
