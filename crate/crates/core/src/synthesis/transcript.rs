use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use super::client::{Decoding, Role};
use super::Mode;
use crate::dsl::Diagnostic;
use crate::games::Game;

/// Request metadata stored with a transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestMeta {
    pub game: Game,
    pub mode: Mode,
    pub model: String,
    pub seed: u64,
    pub decoding: Decoding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptMessage {
    pub role: Role,
    pub content: String,
    /// Code extracted from an assistant reply.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    pub timestamp: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureStage {
    Prompt,
    Transport,
    Extraction,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Pending,
    Ok { program: String },
    Failed { stage: FailureStage, message: String, diagnostics: Vec<Diagnostic> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub request: RequestMeta,
    pub messages: Vec<TranscriptMessage>,
    pub outcome: Outcome,
}

pub fn now_rfc3339() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).expect("RFC 3339 formatting of the current time")
}

impl Transcript {
    pub fn new(request: RequestMeta) -> Self {
        Transcript { request, messages: Vec::new(), outcome: Outcome::Pending }
    }

    pub fn push(&mut self, role: Role, content: impl Into<String>) {
        self.messages.push(TranscriptMessage { role, content: content.into(), code: None, timestamp: now_rfc3339() });
    }

    pub fn roles(&self) -> Vec<Role> {
        self.messages.iter().map(|m| m.role).collect()
    }

    /// Extracted code of every assistant turn, in order.
    pub fn code_blocks(&self) -> Vec<&str> {
        self.messages.iter().filter_map(|m| m.code.as_deref()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
