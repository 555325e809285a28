use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::config::TrainingConfig;
use super::nn::{Adam, Cache};
use super::policy::{log_softmax, Agent};

/// One update's worth of transitions, stored environment-major
/// (`index = env * steps + t`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutBatch {
    pub obs_dim: usize,
    /// Flattened `len x obs_dim`.
    pub obs: Vec<f64>,
    pub actions: Vec<usize>,
    pub logprobs: Vec<f64>,
    pub values: Vec<f64>,
    /// Produced by the reward program only.
    pub rewards: Vec<f64>,
    /// Logged for analysis; nothing in the update reads it.
    pub true_deltas: Vec<f64>,
    pub dones: Vec<bool>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn obs_at(&self, i: usize) -> &[f64] {
        &self.obs[i * self.obs_dim..(i + 1) * self.obs_dim]
    }

    pub fn extend(&mut self, other: RolloutBatch) {
        self.obs_dim = other.obs_dim;
        self.obs.extend(other.obs);
        self.actions.extend(other.actions);
        self.logprobs.extend(other.logprobs);
        self.values.extend(other.values);
        self.rewards.extend(other.rewards);
        self.true_deltas.extend(other.true_deltas);
        self.dones.extend(other.dones);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LossStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_frac: f64,
    pub loss: f64,
    /// Before clipping.
    pub grad_norm: f64,
}

impl LossStats {
    fn add_scaled(&mut self, o: &LossStats, k: f64) {
        self.policy_loss += k * o.policy_loss;
        self.value_loss += k * o.value_loss;
        self.entropy += k * o.entropy;
        self.approx_kl += k * o.approx_kl;
        self.clip_frac += k * o.clip_frac;
        self.loss += k * o.loss;
        self.grad_norm += k * o.grad_norm;
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PpoError {
    #[error("non-finite loss in epoch {epoch}, minibatch {minibatch}: {stats:?}")]
    NonFinite { epoch: usize, minibatch: usize, stats: LossStats },
    #[error("advantages/returns do not match the batch length {0}")]
    Length(usize),
}

/// Per-sample clipped surrogate `min(r A, clip(r, 1-eps, 1+eps) A)`.
pub fn clipped_objective(ratio: f64, advantage: f64, eps: f64) -> f64 {
    (ratio * advantage).min(ratio.clamp(1.0 - eps, 1.0 + eps) * advantage)
}

/// Loss and its gradient over the samples `idx`.
pub fn minibatch_loss(
    agent: &Agent,
    batch: &RolloutBatch,
    idx: &[usize],
    advantages: &[f64],
    returns: &[f64],
    cfg: &TrainingConfig,
) -> (LossStats, Vec<f64>) {
    let m = idx.len() as f64;
    let mut adv: Vec<f64> = idx.iter().map(|&i| advantages[i]).collect();
    if cfg.norm_adv {
        let mean = adv.iter().sum::<f64>() / m;
        let std = if idx.len() > 1 {
            (adv.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
        } else {
            0.0
        };
        for a in adv.iter_mut() {
            *a = (*a - mean) / (std + 1e-8);
        }
    }

    let split = agent.split();
    let (actor_p, critic_p) = agent.params.split_at(split);
    let mut grad = vec![0.0; agent.params.len()];
    let (g_actor, g_critic) = grad.split_at_mut(split);
    let mut s = LossStats::default();
    let eps = cfg.clip_coef;
    let mut cache = Cache::default();
    let mut d_logits = vec![0.0; agent.action_count()];

    for (k, &i) in idx.iter().enumerate() {
        let obs = batch.obs_at(i);
        let a = batch.actions[i];
        let (adv_i, ret_i) = (adv[k], returns[i]);

        agent.actor.forward(actor_p, obs, &mut cache);
        let logp = log_softmax(cache.output());
        let ratio = (logp[a] - batch.logprobs[i]).exp();
        let unclipped = -adv_i * ratio;
        let clipped = -adv_i * ratio.clamp(1.0 - eps, 1.0 + eps);
        let d_ratio = if unclipped >= clipped { -adv_i } else { 0.0 };
        let entropy: f64 = -logp.iter().map(|lp| lp.exp() * lp).sum::<f64>();
        s.policy_loss += unclipped.max(clipped) / m;
        s.entropy += entropy / m;
        s.approx_kl += ((ratio - 1.0) - (logp[a] - batch.logprobs[i])) / m;
        if (ratio - 1.0).abs() > eps {
            s.clip_frac += 1.0 / m;
        }
        for (j, d) in d_logits.iter_mut().enumerate() {
            let p = logp[j].exp();
            let onehot = if j == a { 1.0 } else { 0.0 };
            // policy term through the ratio, minus the entropy bonus
            *d = (d_ratio * ratio * (onehot - p) + cfg.ent_coef * p * (logp[j] + entropy)) / m;
        }
        agent.actor.backward(actor_p, &cache, &d_logits, g_actor);

        agent.critic.forward(critic_p, obs, &mut cache);
        let v = cache.output()[0];
        let (vloss, d_v) = if cfg.clip_vloss {
            let old = batch.values[i];
            let v_clip = old + (v - old).clamp(-eps, eps);
            let (lu, lc) = ((v - ret_i).powi(2), (v_clip - ret_i).powi(2));
            if lu >= lc {
                (0.5 * lu, v - ret_i)
            } else {
                let inside = if (v - old).abs() < eps { 1.0 } else { 0.0 };
                (0.5 * lc, (v_clip - ret_i) * inside)
            }
        } else {
            (0.5 * (v - ret_i).powi(2), v - ret_i)
        };
        s.value_loss += vloss / m;
        agent.critic.backward(critic_p, &cache, &[cfg.vf_coef * d_v / m], g_critic);
    }
    s.loss = s.policy_loss - cfg.ent_coef * s.entropy + cfg.vf_coef * s.value_loss;
    s.grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    (s, grad)
}

/// Epochs of shuffled minibatch steps. Gradients are clipped to the
/// configured global norm; returns statistics averaged over minibatches.
#[allow(clippy::too_many_arguments)]
pub fn ppo_update(
    agent: &mut Agent,
    adam: &mut Adam,
    batch: &RolloutBatch,
    advantages: &[f64],
    returns: &[f64],
    cfg: &TrainingConfig,
    lr: f64,
    rng: &mut impl Rng,
) -> Result<LossStats, PpoError> {
    let n = batch.len();
    if advantages.len() != n || returns.len() != n {
        return Err(PpoError::Length(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut total = LossStats::default();
    let chunks = n.div_ceil(cfg.minibatch_size);
    let k = 1.0 / (cfg.update_epochs * chunks) as f64;
    for epoch in 0..cfg.update_epochs {
        order.shuffle(rng);
        for (minibatch, idx) in order.chunks(cfg.minibatch_size).enumerate() {
            let (stats, mut grad) = minibatch_loss(agent, batch, idx, advantages, returns, cfg);
            if !stats.loss.is_finite() || !stats.grad_norm.is_finite() {
                return Err(PpoError::NonFinite { epoch, minibatch, stats });
            }
            let coef = cfg.max_grad_norm / (stats.grad_norm + 1e-6);
            if coef < 1.0 {
                grad.iter_mut().for_each(|g| *g *= coef);
            }
            adam.step(&mut agent.params, &grad, lr);
            total.add_scaled(&stats, k);
        }
    }
    Ok(total)
}
