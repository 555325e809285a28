use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relreward_core::dsl::ProgramOrigin;
use relreward_core::env::EnvConfig;
use relreward_core::fixtures;
use relreward_core::games::Game;
use relreward_core::trainer::nn::Adam;
use relreward_core::trainer::*;

mod common;
use common::oracles::gae_bruteforce;

#[test]
fn gae_matches_the_double_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.random_range(1..=64);
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let d: Vec<bool> = (0..n).map(|_| rng.random_bool(0.1)).collect();
        let boot = rng.random_range(-2.0..2.0);
        let (gamma, lambda) = (rng.random_range(0.5..1.0), rng.random_range(0.5..1.0));
        let (adv, ret) = compute_gae(&r, &v, &d, boot, gamma, lambda).unwrap();
        let expected = gae_bruteforce(&r, &v, &d, boot, gamma, lambda);
        for t in 0..n {
            assert!((adv[t] - expected[t]).abs() < 1e-10, "t={t}: {} vs {}", adv[t], expected[t]);
            assert_eq!(ret[t], adv[t] + v[t]);
        }
    }
}

fn toy_batch(agent: &Agent, samples: &[(f64, usize, f64, f64)]) -> RolloutBatch {
    // (obs, action, log-ratio offset, old value offset)
    let mut b = RolloutBatch { obs_dim: 1, ..Default::default() };
    for &(x, a, dlog, dv) in samples {
        let logp = log_softmax(&agent.logits(&[x], &mut Default::default()));
        b.obs.push(x);
        b.actions.push(a);
        b.logprobs.push(logp[a] - dlog);
        b.values.push(agent.value(&[x], &mut Default::default()) - dv);
        b.rewards.push(0.0);
        b.true_deltas.push(0.0);
        b.dones.push(false);
    }
    b
}

#[test]
fn toy_gradients_match_finite_differences() {
    // One input, two actions, no hidden layer: two actor weights and
    // biases, one critic weight and bias.
    let mut agent = Agent::new(1, 2, &[], &mut ChaCha8Rng::seed_from_u64(3));
    agent.params = vec![0.4, -0.3, 0.1, 0.05, 0.7, -0.2];
    // Ratios inside and on both sides of the clip range, values inside
    // and outside the value clip range, away from the kinks.
    let samples = [(0.5, 0, 0.03, 0.02), (-1.2, 1, 0.3, -0.5), (0.9, 1, -0.4, 0.3), (2.0, 0, -0.02, -0.04)];
    let batch = toy_batch(&agent, &samples);
    let adv = [1.3, -0.7, 0.4, -1.1];
    let ret = [0.5, -1.0, 0.8, 0.2];
    let idx = [0, 1, 2, 3];
    for (clip_vloss, norm_adv) in [(true, true), (false, false)] {
        let cfg = TrainingConfig { clip_vloss, norm_adv, ..Default::default() };
        let (_, grad) = minibatch_loss(&agent, &batch, &idx, &adv, &ret, &cfg);
        for i in 0..agent.params.len() {
            let h = 1e-6;
            let mut a = agent.clone();
            a.params[i] += h;
            let up = minibatch_loss(&a, &batch, &idx, &adv, &ret, &cfg).0.loss;
            a.params[i] -= 2.0 * h;
            let down = minibatch_loss(&a, &batch, &idx, &adv, &ret, &cfg).0.loss;
            let fd = (up - down) / (2.0 * h);
            let rel = (fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-8);
            assert!(rel < 1e-4, "param {i}: analytic {} vs numeric {fd} (rel {rel})", grad[i]);
        }
    }
}

#[test]
fn two_parameter_critic_gradient() {
    // The value head alone: v(x) = w x + b.
    let mut agent = Agent::new(1, 2, &[], &mut ChaCha8Rng::seed_from_u64(4));
    let split = agent.split();
    agent.params[split] = 0.6;
    agent.params[split + 1] = -0.1;
    let batch = toy_batch(&agent, &[(0.5, 0, 0.0, 0.05), (-1.0, 1, 0.0, -0.02)]);
    let cfg = TrainingConfig::default();
    let ret = [1.0, -2.0];
    let (_, grad) = minibatch_loss(&agent, &batch, &[0, 1], &[0.0, 0.0], &ret, &cfg);
    // Hand derivative of vf_coef * mean(0.5 (v - R)^2) while unclipped.
    let v = |x: f64| 0.6 * x - 0.1;
    let dw = 0.5 * ((v(0.5) - 1.0) * 0.5 + (v(-1.0) + 2.0) * -1.0) / 2.0;
    let db = 0.5 * ((v(0.5) - 1.0) + (v(-1.0) + 2.0)) / 2.0;
    assert!((grad[split] - dw).abs() < 1e-12 && (grad[split + 1] - db).abs() < 1e-12);
}

#[test]
fn unit_ratio_policy_loss_is_minus_mean_advantage() {
    let agent = Agent::new(1, 2, &[4], &mut ChaCha8Rng::seed_from_u64(5));
    let batch = toy_batch(&agent, &[(0.1, 0, 0.0, 0.0), (0.2, 1, 0.0, 0.0), (-0.3, 1, 0.0, 0.0)]);
    let adv = [0.5, -2.0, 4.0];
    let cfg = TrainingConfig { norm_adv: false, ..Default::default() };
    let (stats, _) = minibatch_loss(&agent, &batch, &[0, 1, 2], &adv, &[0.0; 3], &cfg);
    assert!((stats.policy_loss + 2.5 / 3.0).abs() < 1e-12);
    assert_eq!(stats.clip_frac, 0.0);
    assert!(stats.approx_kl.abs() < 1e-15);
}

#[test]
fn non_finite_loss_aborts_the_update() {
    let mut agent = Agent::new(1, 2, &[], &mut ChaCha8Rng::seed_from_u64(6));
    let mut batch = toy_batch(&agent, &[(0.1, 0, 0.0, 0.0), (0.2, 1, 0.0, 0.0)]);
    batch.rewards[1] = f64::NAN;
    let before = agent.params.clone();
    let cfg = TrainingConfig { batch_size: 2, minibatch_size: 2, num_envs: 1, ..Default::default() };
    let mut adam = Adam::new(agent.params.len(), cfg.adam_eps);
    let err = update_from_batch(&mut agent, &mut adam, &batch, &[0.0], &cfg, 1e-3, &mut ChaCha8Rng::seed_from_u64(0));
    assert!(matches!(err, Err(TrainError::Ppo { source: PpoError::NonFinite { .. }, .. })), "{err:?}");
    assert_eq!(agent.params, before);
}

fn small_config() -> TrainingConfig {
    TrainingConfig { total_steps: 2048, batch_size: 512, minibatch_size: 128, num_envs: 4, ..Default::default() }
}

fn short_freeway() -> EnvConfig {
    EnvConfig { horizon: 256, ..EnvConfig::freeway(42) }
}

fn full_freeway() -> relreward_core::RewardProgram {
    fixtures::get(Game::Freeway, ProgramOrigin::Full).unwrap().program()
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| train(&short_freeway(), &full_freeway(), &small_config(), 42).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.agent.params, b.agent.params);
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.config_hash, b.config_hash);
    assert!(a.metrics.iter().any(|r| r.metric == "synthesized_return"));
    assert!(a.metrics.iter().any(|r| r.metric == "true_score"));
    // Four updates of 128 steps per environment, two 256-step episodes each.
    assert_eq!(a.metrics.iter().filter(|r| r.metric == "policy_loss").count(), 4);
    assert_eq!(a.episodes, 8);
    let steps: Vec<u64> = a.metrics.iter().filter(|r| r.metric == "true_score").map(|r| r.step).collect();
    assert_eq!(steps, vec![1021, 1022, 1023, 1024, 2045, 2046, 2047, 2048]);
    let c = train(&short_freeway(), &full_freeway(), &small_config(), 73).unwrap();
    assert_ne!(a.agent.params, c.agent.params);
    assert_ne!(a.config_hash, c.config_hash);
}

#[test]
fn pong_trains_too() {
    let out = train(&EnvConfig::pong(1), &fixtures::get(Game::Pong, ProgramOrigin::Full).unwrap().program(), &small_config(), 1)
        .unwrap();
    assert!(out.agent.params.iter().all(|p| p.is_finite()));
    assert_eq!(out.agent.obs_dim(), 21);
}

#[test]
fn zero_steps_returns_the_initial_policy() {
    let cfg = TrainingConfig { total_steps: 0, ..Default::default() };
    let out = train(&EnvConfig::freeway(42), &full_freeway(), &cfg, 42).unwrap();
    assert!(out.metrics.is_empty());
    assert_eq!(out.episodes, 0);
    let fresh = Agent::new(84, 3, &[64, 64], &mut ChaCha8Rng::seed_from_u64(42));
    assert_eq!(out.agent, fresh);
}

#[test]
fn invalid_config_is_rejected() {
    let cfg = TrainingConfig { minibatch_size: 100, ..Default::default() };
    assert!(matches!(train(&EnvConfig::freeway(42), &full_freeway(), &cfg, 42), Err(TrainError::Config(_))));
    let replay = EnvConfig::replay(Game::Skiing);
    assert!(train(&replay, &full_freeway(), &small_config(), 42).is_err());
}

#[test]
fn true_score_never_reaches_the_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let agent = Agent::new(3, 3, &[8], &mut rng);
    let n = 64;
    let mut batch = RolloutBatch { obs_dim: 3, ..Default::default() };
    for t in 0..n {
        let obs: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (a, lp, v) = agent.act(&obs, &mut rng);
        batch.obs.extend(obs);
        batch.actions.push(a);
        batch.logprobs.push(lp);
        batch.values.push(v);
        batch.rewards.push(rng.random_range(-1.0..1.0));
        batch.true_deltas.push(if t % 9 == 0 { 1.0 } else { 0.0 });
        batch.dones.push(t % 20 == 19);
    }
    let cfg = TrainingConfig { batch_size: n, minibatch_size: 16, num_envs: 2, ..Default::default() };
    let run = |batch: &RolloutBatch| {
        let mut a = agent.clone();
        let mut adam = Adam::new(a.params.len(), cfg.adam_eps);
        let stats =
            update_from_batch(&mut a, &mut adam, batch, &[0.3, -0.2], &cfg, 2.5e-4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        (a.params, stats)
    };
    let base = run(&batch);
    for perturb in [1e6, -3.0, f64::NAN] {
        let mut b = batch.clone();
        b.true_deltas.iter_mut().for_each(|d| *d = perturb);
        let out = run(&b);
        let bits = |p: &[f64]| p.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&out.0), bits(&base.0));
        assert_eq!(out.1, base.1);
    }
}

#[test]
fn checkpoints_embed_the_config_hash() {
    let out = train(&EnvConfig::freeway(42), &full_freeway(), &small_config(), 42).unwrap();
    let bytes = checkpoint::encode(&out.agent, &out.config_hash);
    assert_eq!(checkpoint::decode_for(&bytes, &out.config_hash).unwrap(), out.agent);
    let other = config_hash(&EnvConfig::freeway(42), &full_freeway(), &TrainingConfig::default(), 42);
    assert!(checkpoint::decode_for(&bytes, &other).is_err());
}
