//! Episode traces as JSONL: a header line with the config, then one
//! record per step.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::EnvConfig;
use crate::object::{GameObject, Snapshot};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub snapshot: Snapshot,
    /// Action that led to this snapshot; `None` for the reset snapshot.
    pub action: Option<usize>,
    pub true_score_delta: f64,
    pub done: bool,
}

impl TraceRecord {
    pub fn initial(snapshot: Snapshot) -> Self {
        TraceRecord { snapshot, action: None, true_score_delta: 0.0, done: false }
    }
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    t: u64,
    objects: Vec<GameObject>,
    action: Option<usize>,
    true_score_delta: f64,
    done: bool,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: EnvConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub config: EnvConfig,
    pub records: Vec<TraceRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("trace is empty (missing header line)")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EpisodeTrace {
    pub fn new(config: EnvConfig) -> Self {
        EpisodeTrace { config, records: Vec::new() }
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &Snapshot> {
        self.records.iter().map(|r| &r.snapshot)
    }

    pub fn total_true_score(&self) -> f64 {
        self.records.iter().map(|r| r.true_score_delta).sum()
    }

    /// Checks `records[i].snapshot.t == i` and that only the final record
    /// may be terminal.
    pub fn validate(&self) -> Result<(), TraceError> {
        let n = self.records.len();
        for (i, r) in self.records.iter().enumerate() {
            let line = i + 2;
            if r.snapshot.t != i as u64 {
                return Err(TraceError::Malformed { line, message: format!("t = {} but expected {i}", r.snapshot.t) });
            }
            if r.done && i + 1 != n {
                return Err(TraceError::Malformed { line, message: "done before the final record".into() });
            }
            if !r.true_score_delta.is_finite() {
                return Err(TraceError::Malformed { line, message: "non-finite true_score_delta".into() });
            }
        }
        Ok(())
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        serde_json::to_writer(&mut out, &Header { config: self.config.clone() })?;
        out.write_all(b"\n")?;
        for r in &self.records {
            let line = RecordLine {
                t: r.snapshot.t,
                objects: r.snapshot.objects.clone(),
                action: r.action,
                true_score_delta: r.true_score_delta,
                done: r.done,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn read_jsonl(input: impl BufRead) -> Result<Self, TraceError> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
        let (_, header) = lines.next().ok_or(TraceError::MissingHeader)?;
        let header: Header = serde_json::from_str(&header?)
            .map_err(|e| TraceError::Malformed { line: 1, message: format!("bad header: {e}") })?;
        let mut records = Vec::new();
        for (i, line) in lines {
            let rec: RecordLine =
                serde_json::from_str(&line?).map_err(|e| TraceError::Malformed { line: i + 1, message: e.to_string() })?;
            records.push(TraceRecord {
                snapshot: Snapshot::new(rec.t, rec.objects),
                action: rec.action,
                true_score_delta: rec.true_score_delta,
                done: rec.done,
            });
        }
        let trace = EpisodeTrace { config: header.config, records };
        trace.validate()?;
        Ok(trace)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        Self::read_jsonl(text.as_bytes())
    }
}
