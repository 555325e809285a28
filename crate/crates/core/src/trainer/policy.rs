use rand::Rng;
use serde::{Deserialize, Serialize};

use super::nn::{Cache, Mlp};

/// Separate actor and critic networks over one flat parameter vector:
/// actor parameters first, then the critic's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub actor: Mlp,
    pub critic: Mlp,
    pub params: Vec<f64>,
}

impl Agent {
    pub fn new(obs_dim: usize, actions: usize, hidden: &[usize], rng: &mut impl Rng) -> Self {
        let sizes = |out| {
            let mut s = vec![obs_dim];
            s.extend_from_slice(hidden);
            s.push(out);
            s
        };
        let (actor, critic) = (Mlp::new(sizes(actions)), Mlp::new(sizes(1)));
        let split = actor.param_count();
        let mut params = vec![0.0; split + critic.param_count()];
        actor.init(&mut params[..split], 0.01, rng);
        critic.init(&mut params[split..], 1.0, rng);
        Agent { actor, critic, params }
    }

    pub fn obs_dim(&self) -> usize {
        self.actor.sizes[0]
    }

    pub fn action_count(&self) -> usize {
        *self.actor.sizes.last().unwrap()
    }

    pub fn split(&self) -> usize {
        self.actor.param_count()
    }

    pub fn logits(&self, obs: &[f64], cache: &mut Cache) -> Vec<f64> {
        self.actor.forward(&self.params[..self.split()], obs, cache);
        cache.output().to_vec()
    }

    pub fn value(&self, obs: &[f64], cache: &mut Cache) -> f64 {
        self.critic.forward(&self.params[self.split()..], obs, cache);
        cache.output()[0]
    }

    /// Samples an action; returns it with its log-probability and the
    /// state value.
    pub fn act(&self, obs: &[f64], rng: &mut impl Rng) -> (usize, f64, f64) {
        let mut cache = Cache::default();
        let logp = log_softmax(&self.logits(obs, &mut cache));
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut action = logp.len() - 1;
        for (i, lp) in logp.iter().enumerate() {
            acc += lp.exp();
            if u < acc {
                action = i;
                break;
            }
        }
        (action, logp[action], self.value(obs, &mut cache))
    }

    /// Most likely action.
    pub fn greedy(&self, obs: &[f64]) -> usize {
        let logits = self.logits(obs, &mut Cache::default());
        let mut best = 0;
        for (i, l) in logits.iter().enumerate() {
            if *l > logits[best] {
                best = i;
            }
        }
        best
    }
}

pub fn log_softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    z.iter().map(|v| v - lse).collect()
}
