use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::schema::{IncidentId, IncidentRecord};

use super::state::ReviewEvent;

/// One line of `events.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LogEvent {
    Submitted {
        seq: u64,
        incident_id: IncidentId,
        at: DateTime<Utc>,
        record: IncidentRecord,
    },
    Reviewed {
        seq: u64,
        event: ReviewEvent,
    },
    Revised {
        seq: u64,
        incident_id: IncidentId,
        at: DateTime<Utc>,
        reviewer_id: String,
        record: IncidentRecord,
    },
}

impl LogEvent {
    pub fn seq(&self) -> u64 {
        match self {
            LogEvent::Submitted { seq, .. } | LogEvent::Reviewed { seq, .. } | LogEvent::Revised { seq, .. } => *seq,
        }
    }

    pub fn to_line(&self) -> Vec<u8> {
        let mut line = serde_json::to_vec(self).expect("log events serialize");
        line.push(b'\n');
        line
    }
}

/// Complete lines found after `offset`, and where the complete part ends.
pub struct Tail {
    pub lines: Vec<(Vec<u8>, u64)>,
    pub end: u64,
    pub torn: bool,
}

/// Reads newline-terminated lines from `offset` onwards. A trailing
/// fragment without a newline (an interrupted append) is reported as torn
/// and not returned.
pub fn read_tail(path: &Path, offset: u64) -> io::Result<Tail> {
    let mut bytes = Vec::new();
    match File::open(path) {
        Ok(mut f) => {
            f.seek(SeekFrom::Start(offset))?;
            f.read_to_end(&mut bytes)?;
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(e),
    }
    let mut lines = Vec::new();
    let mut pos = 0usize;
    while let Some(nl) = bytes[pos..].iter().position(|b| *b == b'\n') {
        let line = bytes[pos..pos + nl].to_vec();
        lines.push((line, (nl + 1) as u64));
        pos += nl + 1;
    }
    Ok(Tail {
        lines,
        end: offset + pos as u64,
        torn: pos < bytes.len(),
    })
}

pub fn log_len(path: &Path) -> io::Result<u64> {
    match std::fs::metadata(path) {
        Ok(m) => Ok(m.len()),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(0),
        Err(e) => Err(e),
    }
}

/// Where appended events go.
pub enum Sink {
    Memory,
    File(File),
}

impl Sink {
    /// Opens the log for appending, cutting it back to `valid_len` first so
    /// a torn tail is not glued to the next event.
    pub fn open(path: &Path, valid_len: u64) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).read(true).append(true).open(path)?;
        if file.metadata()?.len() != valid_len {
            file.set_len(valid_len)?;
            file.sync_all()?;
        }
        Ok(Sink::File(file))
    }

    /// Writes one line and syncs it before returning.
    pub fn append(&mut self, line: &[u8]) -> io::Result<()> {
        match self {
            Sink::Memory => Ok(()),
            Sink::File(f) => {
                f.write_all(line)?;
                f.sync_data()
            }
        }
    }
}
