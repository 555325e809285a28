//! PPO with generalized advantage estimation over object-feature
//! observations. Rewards come only from the reward program; the game's own
//! score is logged next to it and never trained on.

pub mod checkpoint;
mod config;
mod gae;
pub mod nn;
mod observe;
mod policy;
mod ppo;
mod train;

pub use config::{hash_parts, ConfigError, TrainingConfig};
pub use gae::{compute_gae, GaeError};
pub use observe::{Layout, ObserveError, SLOT_FEATURES};
pub use policy::{log_softmax, Agent};
pub use ppo::{clipped_objective, minibatch_loss, ppo_update, LossStats, PpoError, RolloutBatch};
pub use train::{
    batch_advantages, config_hash, train, train_with_progress, update_from_batch, TrainError, TrainOutput,
};
