use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// PPO settings. Field names double as the JSON config file format;
/// missing fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_coef: f64,
    /// Transitions per update, over all environments.
    pub batch_size: usize,
    pub minibatch_size: usize,
    pub learning_rate: f64,
    /// Linear decay of the learning rate to 0 over the run.
    pub anneal_lr: bool,
    pub total_steps: u64,
    pub num_envs: usize,
    pub seeds: Vec<u64>,
    pub update_epochs: usize,
    pub ent_coef: f64,
    pub vf_coef: f64,
    pub max_grad_norm: f64,
    pub clip_vloss: bool,
    pub norm_adv: bool,
    pub hidden: Vec<usize>,
    pub adam_eps: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_coef: 0.1,
            batch_size: 1024,
            minibatch_size: 256,
            learning_rate: 2.5e-4,
            anneal_lr: true,
            total_steps: 300_000,
            num_envs: 8,
            seeds: vec![42, 73, 91],
            update_epochs: 4,
            ent_coef: 0.01,
            vf_coef: 0.5,
            max_grad_norm: 0.5,
            clip_vloss: true,
            norm_adv: true,
            hidden: vec![64, 64],
            adam_eps: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid training config: {0}")]
pub struct ConfigError(pub String);

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: &str| Err(ConfigError(m.to_string()));
        if self.num_envs == 0 || self.minibatch_size == 0 || self.batch_size == 0 {
            return err("batch_size, minibatch_size and num_envs must be positive");
        }
        if self.batch_size % self.minibatch_size != 0 {
            return err("batch_size must be divisible by minibatch_size");
        }
        if self.batch_size % self.num_envs != 0 {
            return err("batch_size must be divisible by num_envs");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) || !(self.gae_lambda > 0.0 && self.gae_lambda <= 1.0) {
            return err("gamma and gae_lambda must lie in (0, 1]");
        }
        if !(self.clip_coef > 0.0) {
            return err("clip_coef must be positive");
        }
        if !(self.learning_rate >= 0.0) || !(self.max_grad_norm > 0.0) || !(self.adam_eps > 0.0) {
            return err("learning_rate must be nonnegative, max_grad_norm and adam_eps positive");
        }
        if self.update_epochs == 0 {
            return err("update_epochs must be positive");
        }
        if self.hidden.contains(&0) {
            return err("hidden layer widths must be positive");
        }
        Ok(())
    }

    pub fn steps_per_env(&self) -> usize {
        self.batch_size / self.num_envs
    }

    pub fn num_updates(&self) -> u64 {
        self.total_steps / self.batch_size as u64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Hex SHA-256 over the given parts, each length-prefixed.
pub fn hash_parts(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
