//! Reward synthesis: prompt rendering, the multi-turn protocol and its
//! transcript, against a live endpoint or a stored transcript.

mod client;
mod extract;
mod pipeline;
mod prompts;
mod transcript;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use client::{
    CannedClient, ChatClient, ChatMessage, ChatRequest, ClientError, Decoding, LiveClient, OfflinePlayer, Role,
    API_KEY_VAR, DEFAULT_ENDPOINT, ENDPOINT_VAR,
};
pub use extract::{extract_code, fenced_blocks};
pub use pipeline::{assemble, run_pipeline, SynthesisFailure, Synthesized};
pub use prompts::{render_prompt, PromptContext, PromptError, TemplateId, DSL_SUBSTITUTIONS, GRAMMAR, PLACEHOLDERS};
pub use transcript::{FailureStage, now_rfc3339, Outcome, RequestMeta, Transcript, TranscriptMessage};

use crate::dsl::ProgramOrigin;
use crate::games::Game;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Helpers, then the reward, then rescaling: three user turns.
    Full,
    /// A single direct request.
    NoRelations,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Full, Mode::NoRelations];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::NoRelations => "no_relations",
        }
    }

    pub fn origin(self) -> ProgramOrigin {
        match self {
            Mode::Full => ProgramOrigin::Full,
            Mode::NoRelations => ProgramOrigin::NoRelations,
        }
    }

    /// Messages in a complete transcript.
    pub fn message_count(self) -> usize {
        match self {
            Mode::Full => 7,
            Mode::NoRelations => 3,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mode `{0}` (expected full or no_relations)")]
pub struct UnknownMode(pub String);

impl FromStr for Mode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "no_relations" | "no-relations" => Ok(Mode::NoRelations),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

pub const DEFAULT_MODEL: &str = "gpt-4-turbo";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisRequest {
    pub game: Game,
    pub context: PromptContext,
    pub mode: Mode,
    pub model: String,
    pub seed: u64,
    pub decoding: Decoding,
}

impl SynthesisRequest {
    /// Registry description and schema, default model, seed 42, top_k 0.
    pub fn new(game: Game, mode: Mode) -> Self {
        SynthesisRequest {
            game,
            context: PromptContext::for_game(game),
            mode,
            model: DEFAULT_MODEL.to_string(),
            seed: 42,
            decoding: Decoding::default(),
        }
    }

    pub fn meta(&self) -> RequestMeta {
        RequestMeta {
            game: self.game,
            mode: self.mode,
            model: self.model.clone(),
            seed: self.seed,
            decoding: self.decoding.clone(),
        }
    }
}
