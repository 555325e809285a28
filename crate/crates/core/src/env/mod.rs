//! Deterministic object-emitting mini environments and trace replay.

mod freeway;
mod pong;
mod replay;
mod trace;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use freeway::{FreewayParams, MiniFreeway};
pub use pong::{MiniPong, PongParams};
pub use replay::{replay, replay_chunked, replay_evaluations};
pub use trace::{EpisodeTrace, TraceError, TraceRecord};

use crate::games::Game;
use crate::object::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Freeway,
    Pong,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub game: EnvKind,
    pub seed: u64,
    /// Maximum steps per episode.
    pub horizon: usize,
    pub screen_width: f64,
    pub screen_height: f64,
    pub freeway: FreewayParams,
    pub pong: PongParams,
    /// For replay traces: the game the objects come from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_game: Option<Game>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig::freeway(42)
    }
}

impl EnvConfig {
    pub fn freeway(seed: u64) -> Self {
        EnvConfig {
            game: EnvKind::Freeway,
            seed,
            horizon: 2048,
            screen_width: 160.0,
            screen_height: 160.0,
            freeway: FreewayParams::default(),
            pong: PongParams::default(),
            source_game: None,
        }
    }

    pub fn pong(seed: u64) -> Self {
        EnvConfig { game: EnvKind::Pong, horizon: 4096, ..EnvConfig::freeway(seed) }
    }

    /// Config header for a trace of a game without a simulator.
    pub fn replay(game: Game) -> Self {
        let (w, h) = game.screen();
        EnvConfig {
            game: EnvKind::Replay,
            seed: 0,
            horizon: 0,
            screen_width: w,
            screen_height: h,
            source_game: Some(game),
            ..EnvConfig::freeway(0)
        }
    }

    pub fn for_game(game: Game, seed: u64) -> Result<Self, EnvError> {
        match game {
            Game::Freeway => Ok(EnvConfig::freeway(seed)),
            Game::Pong => Ok(EnvConfig::pong(seed)),
            g => Err(EnvError::NotSimulated(g)),
        }
    }

    /// The game whose objects this config produces.
    pub fn object_game(&self) -> Option<Game> {
        match self.game {
            EnvKind::Freeway => Some(Game::Freeway),
            EnvKind::Pong => Some(Game::Pong),
            EnvKind::Replay => self.source_game,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub snapshot: Snapshot,
    /// Change of the hidden game score. Never used for training.
    pub true_score_delta: f64,
    pub done: bool,
    pub info: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnvError {
    #[error("{0} has no simulator; it is supported through trace replay only")]
    NotSimulated(Game),
    #[error("replay traces cannot be stepped")]
    ReplayNotSteppable,
    #[error("step after the episode ended; call reset first")]
    StepAfterDone,
    #[error("invalid action {action} (expected 0..{count})")]
    InvalidAction { action: usize, count: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// A single-threaded environment instance, owned by one rollout worker.
pub trait Environment: Send {
    fn game(&self) -> Game;
    fn action_count(&self) -> usize;
    fn action_names(&self) -> &'static [&'static str];
    /// Starts a new episode. Repeated calls continue the instance's seeded
    /// random stream, so consecutive episodes differ.
    fn reset(&mut self) -> Snapshot;
    fn step(&mut self, action: usize) -> Result<StepResult, EnvError>;
}

pub fn make(config: &EnvConfig) -> Result<Box<dyn Environment>, EnvError> {
    match config.game {
        EnvKind::Freeway => Ok(Box::new(MiniFreeway::new(config.clone())?)),
        EnvKind::Pong => Ok(Box::new(MiniPong::new(config.clone())?)),
        EnvKind::Replay => Err(EnvError::ReplayNotSteppable),
    }
}

/// Runs one episode with the given action source, recording every step.
pub fn record_episode(
    config: &EnvConfig,
    mut policy: impl FnMut(&Snapshot) -> usize,
) -> Result<EpisodeTrace, EnvError> {
    let mut env = make(config)?;
    let first = env.reset();
    let mut records = vec![TraceRecord::initial(first)];
    loop {
        let action = policy(&records.last().unwrap().snapshot);
        let r = env.step(action)?;
        records.push(TraceRecord {
            snapshot: r.snapshot,
            action: Some(action),
            true_score_delta: r.true_score_delta,
            done: r.done,
        });
        if r.done {
            break;
        }
    }
    Ok(EpisodeTrace { config: config.clone(), records })
}
