//! Persistent incident repository.
//!
//! On disk a store is a directory holding:
//!
//! - `events.jsonl`: append-only log, one JSON event per line, synced after
//!   every append. It is the source of truth.
//! - `index.json`: the derived current state plus the log offset it covers,
//!   rewritten atomically every few hundred events and on [`Store::checkpoint`].
//!   Deleting it only costs a longer replay on the next open.
//! - `LOCK`: held exclusively by the one writable handle.
//!
//! Opening replays whatever part of the log the index does not cover. A
//! trailing partial line left by an interrupted append is discarded.

mod log;
mod query;
mod state;

use std::fs::{File, OpenOptions};
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use log::LogEvent;
pub use query::{CompiledFilter, QueryFilter};
pub use state::{Entry, Index, ReviewAction, ReviewEvent, ReviewState, Revision};

use crate::report::ValidationReport;
use crate::schema::{redact, AccessTier, IncidentId, IncidentRecord, RecordView, SectorVocabulary, Validator};
use crate::taxonomy::Taxonomy;

use log::Sink;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const INDEX_FILE: &str = "index.json";
pub const LOCK_FILE: &str = "LOCK";
const INDEX_FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("record failed validation:\n{0}")]
    Validation(ValidationReport),
    #[error("incident {0} not found")]
    NotFound(String),
    #[error("cannot {action} incident {incident_id} in state {from}")]
    IllegalTransition {
        incident_id: IncidentId,
        from: ReviewState,
        action: ReviewAction,
    },
    #[error("incident {0} is not published and cannot be revised")]
    NotPublished(IncidentId),
    #[error("a reject needs a nonblank reason")]
    MissingReason,
    #[error("review event is for {event} but was sent to {target}")]
    IdMismatch { target: IncidentId, event: IncidentId },
    #[error("bad filter: {0}")]
    BadFilter(String),
    #[error("data directory {0} is locked by another process")]
    Locked(PathBuf),
    #[error("store was opened read-only")]
    ReadOnly,
    #[error("incident id space exhausted")]
    IdsExhausted,
    #[error("event log is corrupt: {0}")]
    Corrupt(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::Validation(_) => "VALIDATION_FAILED",
            StoreError::NotFound(_) => "NOT_FOUND",
            StoreError::IllegalTransition { .. } | StoreError::NotPublished(_) => "ILLEGAL_TRANSITION",
            StoreError::MissingReason => "MISSING_REASON",
            StoreError::IdMismatch { .. } => "BAD_REQUEST",
            StoreError::BadFilter(_) => "BAD_FILTER",
            StoreError::Locked(_) => "LOCKED",
            StoreError::ReadOnly => "READ_ONLY",
            StoreError::IdsExhausted => "IDS_EXHAUSTED",
            StoreError::Corrupt(_) => "CORRUPT_LOG",
            StoreError::Io(_) => "IO_ERROR",
        }
    }

    pub fn report(&self) -> Option<&ValidationReport> {
        match self {
            StoreError::Validation(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StoreOptions {
    pub taxonomy: Taxonomy,
    pub sectors: SectorVocabulary,
    /// Rewrite the index after this many appended events. 0 disables
    /// automatic checkpoints.
    pub checkpoint_every: u64,
}

impl Default for StoreOptions {
    fn default() -> Self {
        Self {
            taxonomy: Taxonomy::default(),
            sectors: SectorVocabulary::default(),
            checkpoint_every: 256,
        }
    }
}

/// Everything a reviewer sees about one incident.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryDetail {
    pub incident_id: IncidentId,
    pub state: ReviewState,
    pub submitted_at: DateTime<Utc>,
    pub record: IncidentRecord,
    pub history: Vec<ReviewEvent>,
    pub revisions: Vec<Revision>,
    pub rejection_reason: Option<String>,
}

impl EntryDetail {
    fn new(id: IncidentId, e: &Entry) -> Self {
        Self {
            incident_id: id,
            state: e.state,
            submitted_at: e.submitted_at,
            record: e.record.clone(),
            history: e.history.clone(),
            revisions: e.revisions.clone(),
            rejection_reason: e.rejection_reason().map(str::to_string),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: u32,
    index: Index,
}

struct Writer {
    sink: Sink,
    since_checkpoint: u64,
}

pub struct Store {
    dir: Option<PathBuf>,
    opts: StoreOptions,
    index: RwLock<Index>,
    writer: Mutex<Option<Writer>>,
    _lock: Option<File>,
}

impl Store {
    /// Opens (creating if needed) a writable store, taking the directory
    /// lock.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_with(dir, StoreOptions::default())
    }

    pub fn open_with(dir: impl AsRef<Path>, opts: StoreOptions) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(dir.join(LOCK_FILE))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(std::fs::TryLockError::WouldBlock) => return Err(StoreError::Locked(dir)),
            Err(std::fs::TryLockError::Error(e)) => return Err(e.into()),
        }
        let log_path = dir.join(EVENTS_FILE);
        let index = load(&dir)?;
        let sink = Sink::open(&log_path, index.log_offset)?;
        Ok(Self {
            dir: Some(dir),
            opts,
            index: RwLock::new(index),
            writer: Mutex::new(Some(Writer {
                sink,
                since_checkpoint: 0,
            })),
            _lock: Some(lock),
        })
    }

    /// Opens a store for reading without taking the lock, so it can be used
    /// next to a running writer. Sees the log as of the moment it was opened.
    pub fn open_read_only(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_read_only_with(dir, StoreOptions::default())
    }

    pub fn open_read_only_with(dir: impl AsRef<Path>, opts: StoreOptions) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        if !dir.is_dir() {
            return Err(io::Error::new(io::ErrorKind::NotFound, format!("{} is not a directory", dir.display())).into());
        }
        let index = load(&dir)?;
        Ok(Self {
            dir: Some(dir),
            opts,
            index: RwLock::new(index),
            writer: Mutex::new(None),
            _lock: None,
        })
    }

    /// A store that keeps nothing on disk.
    pub fn in_memory() -> Self {
        Self::in_memory_with(StoreOptions::default())
    }

    pub fn in_memory_with(opts: StoreOptions) -> Self {
        Self {
            dir: None,
            opts,
            index: RwLock::new(Index::default()),
            writer: Mutex::new(Some(Writer {
                sink: Sink::Memory,
                since_checkpoint: 0,
            })),
            _lock: None,
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.opts.taxonomy
    }

    pub fn sectors(&self) -> &SectorVocabulary {
        &self.opts.sectors
    }

    fn validator(&self) -> Validator<'_> {
        Validator::new(&self.opts.taxonomy, &self.opts.sectors)
    }

    /// Validates and stores a new incident. Any `incident_id` on the input is
    /// ignored and replaced by a freshly allocated one.
    pub fn submit(&self, mut record: IncidentRecord) -> Result<IncidentId, StoreError> {
        let report = self.validator().validate_draft(&record);
        if !report.is_valid() {
            return Err(StoreError::Validation(report));
        }
        let mut guard = self.writer.lock().expect("writer lock poisoned");
        let writer = guard.as_mut().ok_or(StoreError::ReadOnly)?;
        let (id, seq) = {
            let index = self.index.read().expect("index lock poisoned");
            (index.next_id()?, index.events + 1)
        };
        record.incident_id = id.to_string();
        let event = LogEvent::Submitted {
            seq,
            incident_id: id,
            at: Utc::now(),
            record,
        };
        self.commit(writer, event)?;
        Ok(id)
    }

    /// Applies one review action and returns the new state.
    pub fn review(&self, incident_id: IncidentId, event: ReviewEvent) -> Result<ReviewState, StoreError> {
        if event.incident_id != incident_id {
            return Err(StoreError::IdMismatch {
                target: incident_id,
                event: event.incident_id,
            });
        }
        let mut guard = self.writer.lock().expect("writer lock poisoned");
        let writer = guard.as_mut().ok_or(StoreError::ReadOnly)?;
        let seq = self.index.read().expect("index lock poisoned").events + 1;
        self.commit(writer, LogEvent::Reviewed { seq, event })?;
        Ok(self.index.read().expect("index lock poisoned").entry(incident_id)?.state)
    }

    /// Replaces the current version of a published incident. The previous
    /// version is kept in the revision history with the reviewer's id.
    pub fn revise(
        &self,
        incident_id: IncidentId,
        mut record: IncidentRecord,
        reviewer_id: impl Into<String>,
    ) -> Result<(), StoreError> {
        record.incident_id = incident_id.to_string();
        let report = self.validator().validate(&record);
        if !report.is_valid() {
            return Err(StoreError::Validation(report));
        }
        let mut guard = self.writer.lock().expect("writer lock poisoned");
        let writer = guard.as_mut().ok_or(StoreError::ReadOnly)?;
        let seq = self.index.read().expect("index lock poisoned").events + 1;
        let event = LogEvent::Revised {
            seq,
            incident_id,
            at: Utc::now(),
            reviewer_id: reviewer_id.into(),
            record,
        };
        self.commit(writer, event)
    }

    // Caller holds the writer lock, so the index cannot move underneath.
    fn commit(&self, writer: &mut Writer, event: LogEvent) -> Result<(), StoreError> {
        self.index.read().expect("index lock poisoned").check(&event)?;
        let line = event.to_line();
        if let Err(e) = writer.sink.append(&line) {
            if let Sink::File(f) = &writer.sink {
                let offset = self.index.read().expect("index lock poisoned").log_offset;
                let _ = f.set_len(offset);
            }
            return Err(e.into());
        }
        self.index
            .write()
            .expect("index lock poisoned")
            .apply(event, line.len() as u64)?;
        writer.since_checkpoint += 1;
        if self.opts.checkpoint_every > 0 && writer.since_checkpoint >= self.opts.checkpoint_every {
            self.write_index()?;
            writer.since_checkpoint = 0;
        }
        Ok(())
    }

    /// Rewrites the index file so the next open replays nothing.
    pub fn checkpoint(&self) -> Result<(), StoreError> {
        let mut guard = self.writer.lock().expect("writer lock poisoned");
        let writer = guard.as_mut().ok_or(StoreError::ReadOnly)?;
        self.write_index()?;
        writer.since_checkpoint = 0;
        Ok(())
    }

    fn write_index(&self) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let bytes = {
            let index = self.index.read().expect("index lock poisoned");
            serde_json::to_vec(&IndexFile {
                format: INDEX_FORMAT,
                index: index.clone(),
            })
            .expect("index serializes")
        };
        let tmp = dir.join(format!("{INDEX_FILE}.tmp"));
        {
            let mut f = File::create(&tmp)?;
            io::Write::write_all(&mut f, &bytes)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, dir.join(INDEX_FILE))?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.index.read().expect("index lock poisoned").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of events in the log.
    pub fn event_count(&self) -> u64 {
        self.index.read().expect("index lock poisoned").events
    }

    pub fn last_id(&self) -> Option<IncidentId> {
        self.index.read().expect("index lock poisoned").last_id
    }

    pub fn state(&self, id: IncidentId) -> Result<ReviewState, StoreError> {
        Ok(self.index.read().expect("index lock poisoned").entry(id)?.state)
    }

    /// Public readers only see published incidents, redacted; anything else
    /// is reported as absent.
    pub fn get(&self, id: IncidentId, tier: AccessTier) -> Result<RecordView, StoreError> {
        let index = self.index.read().expect("index lock poisoned");
        let entry = index.entry(id)?;
        if tier == AccessTier::Public && entry.state != ReviewState::Published {
            return Err(StoreError::NotFound(id.to_string()));
        }
        Ok(redact(&entry.record, tier))
    }

    /// Full record, state, history and rejection reason. Reviewer only.
    pub fn detail(&self, id: IncidentId) -> Result<EntryDetail, StoreError> {
        let index = self.index.read().expect("index lock poisoned");
        Ok(EntryDetail::new(id, index.entry(id)?))
    }

    /// Matching incidents ordered by incident date (newest first), then id.
    pub fn query(&self, filter: &QueryFilter, tier: AccessTier) -> Result<Vec<RecordView>, StoreError> {
        let compiled = filter.compile(&self.opts.taxonomy, &self.opts.sectors)?;
        let index = self.index.read().expect("index lock poisoned");
        let mut hits: Vec<(IncidentId, &Entry)> = index
            .entries
            .iter()
            .filter(|(_, e)| match tier {
                AccessTier::Public => e.state == ReviewState::Published,
                AccessTier::Reviewer => compiled.admits_state(e.state),
            })
            .filter(|(_, e)| compiled.matches(&e.record))
            .map(|(id, e)| (*id, e))
            .collect();
        hits.sort_by(|(a_id, a), (b_id, b)| {
            let ka = a.record.parsed_date().map(|d| d.sort_key());
            let kb = b.record.parsed_date().map(|d| d.sort_key());
            kb.cmp(&ka).then(a_id.cmp(b_id))
        });
        Ok(hits.into_iter().map(|(_, e)| redact(&e.record, tier)).collect())
    }

    /// Published records, unredacted, in id order. Input for analytics.
    pub fn published(&self) -> Vec<IncidentRecord> {
        self.records_where(|s| s == ReviewState::Published)
    }

    /// Every record regardless of state, in id order.
    pub fn all_records(&self) -> Vec<IncidentRecord> {
        self.records_where(|_| true)
    }

    /// Records in any of `states`, in id order.
    pub fn records_in(&self, states: &[ReviewState]) -> Vec<IncidentRecord> {
        self.records_where(|s| states.contains(&s))
    }

    fn records_where(&self, keep: impl Fn(ReviewState) -> bool) -> Vec<IncidentRecord> {
        let index = self.index.read().expect("index lock poisoned");
        index
            .entries
            .values()
            .filter(|e| keep(e.state))
            .map(|e| e.record.clone())
            .collect()
    }

    /// Ids and states of every incident, in id order.
    pub fn states(&self) -> Vec<(IncidentId, ReviewState)> {
        let index = self.index.read().expect("index lock poisoned");
        index.entries.iter().map(|(id, e)| (*id, e.state)).collect()
    }

    /// Canonical JSON Lines of the public view of every published incident,
    /// in id order.
    pub fn export_public(&self) -> Vec<u8> {
        let index = self.index.read().expect("index lock poisoned");
        let mut out = Vec::new();
        for e in index.entries.values().filter(|e| e.state == ReviewState::Published) {
            out.extend(redact(&e.record, AccessTier::Public).to_json());
            out.push(b'\n');
        }
        out
    }
}

/// Loads the index (if usable) and replays the rest of the log.
fn load(dir: &Path) -> Result<Index, StoreError> {
    let log_path = dir.join(EVENTS_FILE);
    let log_len = log::log_len(&log_path)?;
    let mut index = read_index(dir, log_len).unwrap_or_default();
    let tail = log::read_tail(&log_path, index.log_offset)?;
    let first_line = index.events + 1;
    for (n, (line, len)) in tail.lines.into_iter().enumerate() {
        let event: LogEvent = serde_json::from_slice(&line)
            .map_err(|e| StoreError::Corrupt(format!("event {}: {e}", first_line + n as u64)))?;
        index
            .apply(event, len)
            .map_err(|e| StoreError::Corrupt(format!("event {}: {e}", first_line + n as u64)))?;
    }
    debug_assert_eq!(index.log_offset, tail.end);
    if tail.torn {
        tracing::warn!(
            discarded = log_len - tail.end,
            "event log ends in a partial line; ignoring it"
        );
    }
    Ok(index)
}

// An index that claims more log than exists, or does not end on a line
// boundary, is stale and ignored.
fn read_index(dir: &Path, log_len: u64) -> Option<Index> {
    let bytes = std::fs::read(dir.join(INDEX_FILE)).ok()?;
    let file: IndexFile = serde_json::from_slice(&bytes).ok()?;
    if file.format != INDEX_FORMAT || file.index.log_offset > log_len {
        return None;
    }
    if file.index.log_offset > 0 {
        use std::io::{Read, Seek, SeekFrom};
        let mut f = File::open(dir.join(EVENTS_FILE)).ok()?;
        f.seek(SeekFrom::Start(file.index.log_offset - 1)).ok()?;
        let mut b = [0u8; 1];
        f.read_exact(&mut b).ok()?;
        if b[0] != b'\n' {
            return None;
        }
    }
    Some(file.index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::test_support::valid_record;
    use crate::schema::HarmKind;
    use std::sync::Arc;

    fn id(n: u32) -> IncidentId {
        IncidentId::new(n).unwrap()
    }

    fn publish(store: &Store, r: IncidentRecord) -> IncidentId {
        let i = store.submit(r).unwrap();
        store.review(i, ReviewEvent::claim(i, "rev")).unwrap();
        store.review(i, ReviewEvent::approve(i, "rev")).unwrap();
        i
    }

    #[test]
    fn first_id_and_happy_path() {
        let s = Store::in_memory();
        let mut r = valid_record();
        r.incident_id = String::new();
        let i = s.submit(r).unwrap();
        assert_eq!(i.to_string(), "CDI-000001");
        assert_eq!(s.review(i, ReviewEvent::claim(i, "a")).unwrap(), ReviewState::UnderReview);
        assert_eq!(s.review(i, ReviewEvent::approve(i, "a")).unwrap(), ReviewState::Published);
        let err = s.review(i, ReviewEvent::reject(i, "a", "late")).unwrap_err();
        assert_eq!(err.code(), "ILLEGAL_TRANSITION");
        assert_eq!(s.detail(i).unwrap().history.len(), 2);
    }

    #[test]
    fn submit_rejects_invalid() {
        let s = Store::in_memory();
        let mut r = valid_record();
        r.incident_summary = vec!["w"; 251].join(" ");
        let err = s.submit(r).unwrap_err();
        assert_eq!(err.code(), "VALIDATION_FAILED");
        assert!(err.report().unwrap().has_code(crate::report::ViolationCode::SummaryTooLong));
        assert!(s.is_empty());
    }

    #[test]
    fn review_errors() {
        let s = Store::in_memory();
        let i = s.submit(valid_record()).unwrap();
        assert_eq!(s.review(id(9), ReviewEvent::claim(id(9), "a")).unwrap_err().code(), "NOT_FOUND");
        assert_eq!(s.review(i, ReviewEvent::approve(i, "a")).unwrap_err().code(), "ILLEGAL_TRANSITION");
        s.review(i, ReviewEvent::claim(i, "a")).unwrap();
        let blank = ReviewEvent::new(i, ReviewAction::Reject, "a").with_reason("  ");
        assert_eq!(s.review(i, blank).unwrap_err().code(), "MISSING_REASON");
        assert_eq!(s.state(i).unwrap(), ReviewState::UnderReview);
        assert_eq!(s.review(i, ReviewEvent::claim(id(2), "a")).unwrap_err().code(), "BAD_REQUEST");
        s.review(i, ReviewEvent::reject(i, "a", "not an AI incident")).unwrap();
        let d = s.detail(i).unwrap();
        assert_eq!(d.rejection_reason.as_deref(), Some("not an AI incident"));
        assert_eq!(s.get(i, AccessTier::Public).unwrap_err().code(), "NOT_FOUND");
        assert!(matches!(s.get(i, AccessTier::Reviewer).unwrap(), RecordView::Full(_)));
    }

    #[test]
    fn visibility_and_order() {
        let s = Store::in_memory();
        let mut a = valid_record();
        a.incident_date = "2022-01-01".into();
        let mut b = valid_record();
        b.incident_date = "2024-01-01".into();
        let ia = publish(&s, a);
        let ib = publish(&s, b);
        let ic = publish(&s, valid_record());
        let pending = s.submit(valid_record()).unwrap();
        let public = s.query(&QueryFilter::default(), AccessTier::Public).unwrap();
        let ids: Vec<&str> = public.iter().map(|v| v.incident_id()).collect();
        assert_eq!(ids, vec![ib.to_string(), ic.to_string(), ia.to_string()]);
        assert!(public.iter().all(|v| matches!(v, RecordView::Public(_))));
        let all = s.query(&QueryFilter::default(), AccessTier::Reviewer).unwrap();
        assert_eq!(all.len(), 4);
        let queue = QueryFilter {
            states: vec!["submitted".into()],
            ..Default::default()
        };
        let q = s.query(&queue, AccessTier::Reviewer).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].incident_id(), pending.to_string());
        let bad = QueryFilter {
            severity: vec!["Catastrophic".into()],
            ..Default::default()
        };
        assert_eq!(s.query(&bad, AccessTier::Public).unwrap_err().code(), "BAD_FILTER");
        assert_eq!(s.published().len(), 3);
        let export = String::from_utf8(s.export_public()).unwrap();
        assert_eq!(export.lines().count(), 3);
        assert!(!export.contains("submitter"));
    }

    #[test]
    fn harm_filter_brute_force() {
        let s = Store::in_memory();
        let mut expected = Vec::new();
        for n in 0..5 {
            let mut r = valid_record();
            if n % 2 == 1 {
                r.harms.set_present(HarmKind::HumanRights);
            }
            let i = publish(&s, r);
            if n % 2 == 1 {
                expected.push(i.to_string());
            }
        }
        let f = QueryFilter {
            harm_kinds: vec!["human_rights".into()],
            ..Default::default()
        };
        let mut got: Vec<String> = s
            .query(&f, AccessTier::Public)
            .unwrap()
            .iter()
            .map(|v| v.incident_id().to_string())
            .collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn revisions_keep_history() {
        let s = Store::in_memory();
        let i = s.submit(valid_record()).unwrap();
        let mut changed = valid_record();
        changed.incident_title = "Corrected title".into();
        assert_eq!(s.revise(i, changed.clone(), "r").unwrap_err().code(), "ILLEGAL_TRANSITION");
        s.review(i, ReviewEvent::claim(i, "r")).unwrap();
        s.review(i, ReviewEvent::approve(i, "r")).unwrap();
        s.revise(i, changed, "r2").unwrap();
        let d = s.detail(i).unwrap();
        assert_eq!(d.record.incident_title, "Corrected title");
        assert_eq!(d.revisions.len(), 1);
        assert_eq!(d.revisions[0].reviewer_id, "r2");
        assert_eq!(d.state, ReviewState::Published);
    }

    #[test]
    fn reopen_replays_log() {
        let dir = tempfile::tempdir().unwrap();
        let (i1, i2);
        {
            let s = Store::open(dir.path()).unwrap();
            i1 = publish(&s, valid_record());
            i2 = s.submit(valid_record()).unwrap();
        }
        let s = Store::open(dir.path()).unwrap();
        assert_eq!(s.state(i1).unwrap(), ReviewState::Published);
        assert_eq!(s.state(i2).unwrap(), ReviewState::Submitted);
        assert_eq!(s.event_count(), 4);
        let i3 = s.submit(valid_record()).unwrap();
        assert!(i3 > i2);
    }

    #[test]
    fn checkpoint_then_more_events() {
        let dir = tempfile::tempdir().unwrap();
        {
            let s = Store::open(dir.path()).unwrap();
            publish(&s, valid_record());
            s.checkpoint().unwrap();
            s.submit(valid_record()).unwrap();
        }
        assert!(dir.path().join(INDEX_FILE).exists());
        let s = Store::open(dir.path()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.event_count(), 4);
        drop(s);
        std::fs::remove_file(dir.path().join(INDEX_FILE)).unwrap();
        let s = Store::open(dir.path()).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn torn_tail_is_dropped_and_overwritten() {
        let dir = tempfile::tempdir().unwrap();
        {
            let s = Store::open(dir.path()).unwrap();
            s.submit(valid_record()).unwrap();
        }
        let log_path = dir.path().join(EVENTS_FILE);
        let good = std::fs::read(&log_path).unwrap();
        let mut torn = good.clone();
        torn.extend_from_slice(b"{\"type\":\"submitted\",\"seq\":2,\"inc");
        std::fs::write(&log_path, &torn).unwrap();

        let ro = Store::open_read_only(dir.path()).unwrap();
        assert_eq!(ro.len(), 1);
        assert_eq!(ro.submit(valid_record()).unwrap_err().code(), "READ_ONLY");
        drop(ro);

        let s = Store::open(dir.path()).unwrap();
        assert_eq!(std::fs::read(&log_path).unwrap(), good);
        let i = s.submit(valid_record()).unwrap();
        assert_eq!(i, id(2));
        drop(s);
        assert_eq!(Store::open(dir.path()).unwrap().len(), 2);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(EVENTS_FILE), b"not json\n").unwrap();
        assert_eq!(Store::open(dir.path()).err().unwrap().code(), "CORRUPT_LOG");
    }

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let s = Store::open(dir.path()).unwrap();
        assert_eq!(Store::open(dir.path()).err().unwrap().code(), "LOCKED");
        assert!(Store::open_read_only(dir.path()).is_ok());
        drop(s);
        assert!(Store::open(dir.path()).is_ok());
    }

    #[test]
    fn concurrent_submits_get_distinct_ids() {
        let dir = tempfile::tempdir().unwrap();
        let s = Arc::new(Store::open(dir.path()).unwrap());
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let s = Arc::clone(&s);
                std::thread::spawn(move || (0..5).map(|_| s.submit(valid_record()).unwrap()).collect::<Vec<_>>())
            })
            .collect();
        let mut ids: Vec<IncidentId> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 40);
        drop(s);
        assert_eq!(Store::open(dir.path()).unwrap().len(), 40);
    }

    #[test]
    fn automatic_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let opts = StoreOptions {
            checkpoint_every: 2,
            ..Default::default()
        };
        let s = Store::open_with(dir.path(), opts).unwrap();
        s.submit(valid_record()).unwrap();
        assert!(!dir.path().join(INDEX_FILE).exists());
        s.submit(valid_record()).unwrap();
        assert!(dir.path().join(INDEX_FILE).exists());
    }
}
