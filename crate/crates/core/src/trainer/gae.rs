/// Generalized advantage estimation over one environment's steps.
///
/// `dones[t]` marks that the episode ended with step `t`; the value after
/// the last step is `bootstrap`. Returns `(advantages, returns)` with
/// `returns = advantages + values`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>), GaeError> {
    let n = rewards.len();
    if values.len() != n || dones.len() != n {
        return Err(GaeError { rewards: n, values: values.len(), dones: dones.len() });
    }
    let mut adv = vec![0.0; n];
    let mut next_adv = 0.0;
    let mut next_value = bootstrap;
    for t in (0..n).rev() {
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * live - values[t];
        next_adv = delta + gamma * lambda * live * next_adv;
        adv[t] = next_adv;
        next_value = values[t];
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((adv, returns))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("length mismatch: {rewards} rewards, {values} values, {dones} done flags")]
pub struct GaeError {
    pub rewards: usize,
    pub values: usize,
    pub dones: usize,
}
