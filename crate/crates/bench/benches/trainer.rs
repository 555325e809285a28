use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relreward_core::dsl::ProgramOrigin;
use relreward_core::env::{make, EnvConfig};
use relreward_core::fixtures;
use relreward_core::games::Game;
use relreward_core::trainer::nn::Adam;
use relreward_core::trainer::*;

/// A full-size batch of random transitions over the Freeway observation.
fn batch(agent: &Agent, n: usize, rng: &mut ChaCha8Rng) -> RolloutBatch {
    let mut b = RolloutBatch { obs_dim: agent.obs_dim(), ..Default::default() };
    for t in 0..n {
        let obs: Vec<f64> = (0..agent.obs_dim()).map(|_| rng.random_range(0.0..1.0)).collect();
        let (a, lp, v) = agent.act(&obs, rng);
        b.obs.extend(obs);
        b.actions.push(a);
        b.logprobs.push(lp);
        b.values.push(v);
        b.rewards.push(rng.random_range(-1.0..1.0));
        b.true_deltas.push(0.0);
        b.dones.push(t % 128 == 127);
    }
    b
}

fn update(c: &mut Criterion) {
    let cfg = TrainingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let agent = Agent::new(84, 3, &cfg.hidden, &mut rng);
    let b = batch(&agent, cfg.batch_size, &mut rng);
    let boots = vec![0.0; cfg.num_envs];
    c.bench_function("ppo_update/1024x4_epochs", |bench| {
        bench.iter(|| {
            let mut a = agent.clone();
            let mut adam = Adam::new(a.params.len(), cfg.adam_eps);
            update_from_batch(&mut a, &mut adam, &b, &boots, &cfg, cfg.learning_rate, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
        })
    });
    c.bench_function("gae/1024", |bench| {
        bench.iter(|| batch_advantages(&b, &boots, &cfg).unwrap())
    });
}

fn rollout(c: &mut Criterion) {
    let program = fixtures::get(Game::Freeway, ProgramOrigin::Full).unwrap().program();
    let layout = Layout::new(Game::Freeway, 160.0, 160.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let agent = Agent::new(layout.dim(), 3, &[64, 64], &mut rng);
    c.bench_function("rollout/freeway_128_steps", |bench| {
        bench.iter(|| {
            let mut env = make(&EnvConfig::freeway(1)).unwrap();
            let mut obs = layout.observe(&env.reset()).unwrap();
            let mut total = 0.0;
            for _ in 0..128 {
                let (a, _, _) = agent.act(&obs, &mut rng);
                let s = env.step(a).unwrap();
                total += relreward_core::evaluate(&program, &s.snapshot).reward;
                obs = layout.observe(&s.snapshot).unwrap();
            }
            total
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = update, rollout
}
criterion_main!(benches);
