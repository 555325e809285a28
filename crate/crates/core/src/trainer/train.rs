use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{hash_parts, ConfigError, TrainingConfig};
use super::gae::{compute_gae, GaeError};
use super::nn::Adam;
use super::observe::{Layout, ObserveError};
use super::policy::Agent;
use super::ppo::{ppo_update, LossStats, PpoError, RolloutBatch};
use crate::analysis::{MetricRow, REWARD_TRAPS, SYNTH_RETURN, TRUE_SCORE};
use crate::dsl::{evaluate, RewardProgram};
use crate::env::{make, EnvConfig, EnvError, Environment};

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("environment: {0}")]
    Env(#[from] EnvError),
    #[error("observation: {0}")]
    Observe(#[from] ObserveError),
    #[error("update {update}: {source}")]
    Ppo { update: u64, source: PpoError },
    #[error(transparent)]
    Gae(#[from] GaeError),
}

pub struct TrainOutput {
    pub seed: u64,
    pub agent: Agent,
    /// Per-episode synthesized return and true score, per-update losses.
    pub metrics: Vec<MetricRow>,
    pub reward_traps: u64,
    pub episodes: u64,
    pub config_hash: String,
}

/// Identity of a run's inputs: training config, environment, program
/// source and seed.
pub fn config_hash(env: &EnvConfig, program: &RewardProgram, cfg: &TrainingConfig, seed: u64) -> String {
    let env_json = serde_json::to_string(env).expect("env config serializes");
    hash_parts(&[cfg.to_json().as_bytes(), env_json.as_bytes(), program.source_text.as_bytes(), &seed.to_le_bytes()])
}

#[derive(Debug, Clone, Copy)]
struct Episode {
    /// Index of the final step within the segment.
    t: usize,
    synth: f64,
    true_score: f64,
    length: usize,
}

struct Segment {
    batch: RolloutBatch,
    bootstrap: f64,
    episodes: Vec<Episode>,
    traps: u64,
}

struct Worker {
    env: Box<dyn Environment>,
    rng: ChaCha8Rng,
    obs: Vec<f64>,
    synth: f64,
    true_score: f64,
    length: usize,
}

impl Worker {
    fn collect(&mut self, agent: &Agent, program: &RewardProgram, layout: &Layout, steps: usize) -> Result<Segment, TrainError> {
        let mut batch = RolloutBatch { obs_dim: layout.dim(), ..Default::default() };
        let mut episodes = Vec::new();
        let mut traps = 0;
        for t in 0..steps {
            let (action, logp, value) = agent.act(&self.obs, &mut self.rng);
            let step = self.env.step(action)?;
            let ev = evaluate(program, &step.snapshot);
            if ev.trapped() {
                traps += 1;
            }
            batch.obs.extend_from_slice(&self.obs);
            batch.actions.push(action);
            batch.logprobs.push(logp);
            batch.values.push(value);
            batch.rewards.push(ev.reward);
            batch.true_deltas.push(step.true_score_delta);
            batch.dones.push(step.done);
            self.synth += ev.reward;
            self.true_score += step.true_score_delta;
            self.length += 1;
            let next = if step.done {
                episodes.push(Episode { t, synth: self.synth, true_score: self.true_score, length: self.length });
                (self.synth, self.true_score, self.length) = (0.0, 0.0, 0);
                self.env.reset()
            } else {
                step.snapshot
            };
            self.obs = layout.observe(&next)?;
        }
        let bootstrap = agent.value(&self.obs, &mut Default::default());
        Ok(Segment { batch, bootstrap, episodes, traps })
    }
}

/// Advantages and returns for an environment-major batch of `segments`
/// equal-length segments, each with its bootstrap value.
pub fn batch_advantages(
    batch: &RolloutBatch,
    bootstraps: &[f64],
    cfg: &TrainingConfig,
) -> Result<(Vec<f64>, Vec<f64>), GaeError> {
    let steps = batch.len() / bootstraps.len().max(1);
    let (mut adv, mut ret) = (Vec::with_capacity(batch.len()), Vec::with_capacity(batch.len()));
    for (e, &b) in bootstraps.iter().enumerate() {
        let r = e * steps..(e + 1) * steps;
        let (a, rt) = compute_gae(
            &batch.rewards[r.clone()],
            &batch.values[r.clone()],
            &batch.dones[r],
            b,
            cfg.gamma,
            cfg.gae_lambda,
        )?;
        adv.extend(a);
        ret.extend(rt);
    }
    Ok((adv, ret))
}

/// One PPO update from a collected batch. Only rewards, values, dones,
/// observations, actions and log-probabilities are read.
pub fn update_from_batch(
    agent: &mut Agent,
    adam: &mut Adam,
    batch: &RolloutBatch,
    bootstraps: &[f64],
    cfg: &TrainingConfig,
    lr: f64,
    rng: &mut impl Rng,
) -> Result<LossStats, TrainError> {
    let (adv, ret) = batch_advantages(batch, bootstraps, cfg)?;
    ppo_update(agent, adam, batch, &adv, &ret, cfg, lr, rng).map_err(|source| TrainError::Ppo { update: 0, source })
}

/// Trains one seed. The seed determines the network initialization, the
/// environment seeds and all action sampling; results do not depend on
/// the thread count.
pub fn train(env: &EnvConfig, program: &RewardProgram, cfg: &TrainingConfig, seed: u64) -> Result<TrainOutput, TrainError> {
    train_with_progress(env, program, cfg, seed, |_, _| {})
}

/// As `train`, calling `progress(update, total_updates)` after every update.
pub fn train_with_progress(
    env: &EnvConfig,
    program: &RewardProgram,
    cfg: &TrainingConfig,
    seed: u64,
    mut progress: impl FnMut(u64, u64),
) -> Result<TrainOutput, TrainError> {
    cfg.validate()?;
    let game = env.object_game().ok_or(EnvError::ReplayNotSteppable)?;
    let layout = Layout::new(game, env.screen_width, env.screen_height)?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let probe = make(env)?;
    let mut agent = Agent::new(layout.dim(), probe.action_count(), &cfg.hidden, &mut master);
    drop(probe);
    let mut adam = Adam::new(agent.params.len(), cfg.adam_eps);
    let mut update_rng = ChaCha8Rng::seed_from_u64(master.next_u64());

    let mut workers = Vec::with_capacity(cfg.num_envs);
    for _ in 0..cfg.num_envs {
        let env_cfg = EnvConfig { seed: master.next_u64(), ..env.clone() };
        let mut e = make(&env_cfg)?;
        let obs = layout.observe(&e.reset())?;
        let rng = ChaCha8Rng::seed_from_u64(master.next_u64());
        workers.push(Worker { env: e, rng, obs, synth: 0.0, true_score: 0.0, length: 0 });
    }

    let steps = cfg.steps_per_env();
    let updates = cfg.num_updates();
    let batch_size = cfg.batch_size as u64;
    let mut metrics = Vec::new();
    let (mut traps, mut episodes) = (0u64, 0u64);
    let row = |step, metric: &str, value| MetricRow { step, metric: metric.to_string(), value, seed };

    for update in 0..updates {
        let segments: Vec<Segment> = workers
            .par_iter_mut()
            .map(|w| w.collect(&agent, program, &layout, steps))
            .collect::<Result<_, _>>()?;

        let base = update * batch_size;
        let mut ends: Vec<(u64, Episode)> = Vec::new();
        let mut batch = RolloutBatch::default();
        let mut bootstraps = Vec::with_capacity(segments.len());
        for (i, seg) in segments.into_iter().enumerate() {
            traps += seg.traps;
            for ep in seg.episodes {
                ends.push((base + (ep.t * cfg.num_envs + i) as u64 + 1, ep));
            }
            bootstraps.push(seg.bootstrap);
            batch.extend(seg.batch);
        }
        ends.sort_by_key(|e| e.0);
        for (step, ep) in ends {
            episodes += 1;
            metrics.push(row(step, SYNTH_RETURN, ep.synth));
            metrics.push(row(step, TRUE_SCORE, ep.true_score));
            metrics.push(row(step, "episode_length", ep.length as f64));
        }

        let lr = if cfg.anneal_lr {
            (1.0 - update as f64 / updates as f64) * cfg.learning_rate
        } else {
            cfg.learning_rate
        };
        let stats = update_from_batch(&mut agent, &mut adam, &batch, &bootstraps, cfg, lr, &mut update_rng).map_err(
            |e| match e {
                TrainError::Ppo { source, .. } => TrainError::Ppo { update: update + 1, source },
                e => e,
            },
        )?;
        let step = base + batch_size;
        for (name, v) in [
            ("policy_loss", stats.policy_loss),
            ("value_loss", stats.value_loss),
            ("entropy", stats.entropy),
            ("approx_kl", stats.approx_kl),
            ("clip_frac", stats.clip_frac),
            ("grad_norm", stats.grad_norm),
            ("learning_rate", lr),
            (REWARD_TRAPS, traps as f64),
        ] {
            metrics.push(row(step, name, v));
        }
        progress(update + 1, updates);
    }

    Ok(TrainOutput {
        seed,
        agent,
        metrics,
        reward_traps: traps,
        episodes,
        config_hash: config_hash(env, program, cfg, seed),
    })
}
