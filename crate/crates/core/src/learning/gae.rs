use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use super::rollout::RolloutBatch;

/// Un-normalised advantages and returns. The value after a `done` step is 0.
pub fn gae_raw(batch: &RolloutBatch, gamma: f64, lam: f64) -> (Vec<f64>, Vec<f64>) {
    let tr = &batch.transitions;
    let mut adv = vec![0.0; tr.len()];
    let mut next_adv = 0.0;
    for t in (0..tr.len()).rev() {
        let (next_value, carry) = if tr[t].done || t + 1 == tr.len() { (0.0, 0.0) } else { (tr[t + 1].value, next_adv) };
        let delta = tr[t].reward + gamma * next_value - tr[t].value;
        adv[t] = delta + gamma * lam * carry;
        next_adv = adv[t];
    }
    let returns = adv.iter().zip(tr).map(|(a, x)| a + x.value).collect();
    (adv, returns)
}

/// Shifts and scales to zero mean, unit (population) std. A constant input
/// becomes all zeros.
pub fn normalize(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = sqrt(var);
    for x in v.iter_mut() {
        *x = if std > 0.0 { (*x - mean) / std } else { 0.0 };
    }
}

/// Normalised advantages and (un-normalised) returns.
pub fn compute_gae(batch: &RolloutBatch, gamma: f64, lam: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut adv, returns) = gae_raw(batch, gamma, lam);
    normalize(&mut adv);
    (adv, returns)
}
