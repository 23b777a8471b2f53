use alloc::vec::Vec;

use libm::exp;
use rand::seq::SliceRandom;

use super::rollout::RolloutBatch;
use crate::error::{invalid, Error, Result};
use crate::nets::{add_scaled, global_norm, scale_all, zeros_like, Adam, GaussianMlpPolicy, MlpTrace, Params, ValueNet};
use crate::rng::{derive, rng_from, stream};

/// Update rule applied to the clipped gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Sgd,
    Adam,
}

impl Optimizer {
    pub fn as_str(self) -> &'static str {
        match self {
            Optimizer::Sgd => "sgd",
            Optimizer::Adam => "adam",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sgd" => Some(Optimizer::Sgd),
            "adam" => Some(Optimizer::Adam),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpoConfig {
    pub clip_eps: f64,
    pub gamma: f64,
    pub lam: f64,
    pub learning_rate: f64,
    pub epochs: u32,
    pub minibatch: usize,
    pub value_coef: f64,
    pub max_grad_norm: f64,
    pub samples_per_iter: usize,
    pub episode_len_max_s: f64,
    pub optimizer: Optimizer,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            clip_eps: 0.2,
            gamma: 0.99,
            lam: 0.95,
            learning_rate: 3e-4,
            epochs: 10,
            minibatch: 4096,
            value_coef: 0.5,
            max_grad_norm: 0.5,
            samples_per_iter: 30_000,
            episode_len_max_s: 10.0,
            optimizer: Optimizer::Sgd,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip_eps > 0.0 && self.clip_eps < 1.0) {
            return Err(invalid("clip_eps", "must be in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(invalid("gamma", "must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.lam) {
            return Err(invalid("lam", "must be in [0, 1]"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(invalid("learning_rate", "must be finite and >= 0"));
        }
        if self.minibatch == 0 {
            return Err(invalid("minibatch", "must be > 0"));
        }
        if !(self.value_coef.is_finite() && self.value_coef >= 0.0) {
            return Err(invalid("value_coef", "must be finite and >= 0"));
        }
        if !(self.max_grad_norm > 0.0) {
            return Err(invalid("max_grad_norm", "must be > 0"));
        }
        if self.samples_per_iter == 0 {
            return Err(invalid("samples_per_iter", "must be > 0"));
        }
        if !(self.episode_len_max_s > 0.0 && self.episode_len_max_s.is_finite()) {
            return Err(invalid("episode_len_max_s", "must be finite and > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PpoStats {
    pub mean_ratio: f64,
    pub clip_fraction: f64,
    /// Negated clipped surrogate, averaged over minibatch evaluations.
    pub policy_loss: f64,
    pub value_loss: f64,
    /// Largest |ρ − 1| in the very first minibatch.
    pub first_ratio_dev: f64,
    pub updates: u32,
}

/// Clipped surrogate objective of `policy` on the batch.
pub fn surrogate(policy: &GaussianMlpPolicy, batch: &RolloutBatch, adv: &[f64], clip_eps: f64) -> Result<f64> {
    let mut total = 0.0;
    for (t, a) in batch.transitions.iter().zip(adv) {
        let ratio = exp(policy.logprob(&t.obs, &t.pre_squash)? - t.logprob);
        total += (ratio * a).min(ratio.clamp(1.0 - clip_eps, 1.0 + clip_eps) * a);
    }
    Ok(total / batch.len() as f64)
}

/// Gradients of the clipped surrogate (ascent direction) and of the value
/// loss (descent direction) over the listed samples. Returns
/// (surrogate, value loss, summed ratio, clipped count, max |ρ − 1|).
#[allow(clippy::too_many_arguments)]
pub fn ppo_gradients(
    policy: &GaussianMlpPolicy,
    value: &ValueNet,
    batch: &RolloutBatch,
    adv: &[f64],
    returns: &[f64],
    indices: &[usize],
    cfg: &PpoConfig,
    pgrad: &mut GaussianMlpPolicy,
    vgrad: &mut ValueNet,
) -> Result<(f64, f64, f64, usize, f64)> {
    let n = indices.len() as f64;
    let (mut surr, mut vloss, mut ratio_sum, mut clipped, mut max_dev) = (0.0, 0.0, 0.0, 0usize, 0.0f64);
    let mut trace = MlpTrace::default();
    for &i in indices {
        let t = &batch.transitions[i];
        let a = adv[i];
        let lp = policy.logprob_traced(&t.obs, &t.pre_squash, &mut trace)?;
        let ratio = exp(lp - t.logprob);
        let unclipped = ratio * a;
        let clipped_term = ratio.clamp(1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * a;
        surr += unclipped.min(clipped_term);
        ratio_sum += ratio;
        max_dev = max_dev.max((ratio - 1.0).abs());
        if unclipped <= clipped_term {
            if a != 0.0 {
                policy.logprob_backward(&t.pre_squash, a * ratio / n, &trace, pgrad)?;
            }
        } else {
            clipped += 1;
        }
        // value loss in network units: value_coef · ((V − R) / scale)²
        let v = value.value_traced(&t.obs, &mut trace)?;
        let e = (v - returns[i]) / value.scale;
        vloss += cfg.value_coef * e * e;
        value.value_backward(2.0 * cfg.value_coef * e / (value.scale * n), &trace, vgrad)?;
    }
    Ok((surr / n, vloss / n, ratio_sum, clipped, max_dev))
}

/// Optimiser state carried across PPO iterations.
#[derive(Debug, Clone)]
pub struct PpoOptimizer {
    kind: Optimizer,
    policy: Adam<GaussianMlpPolicy>,
    value: Adam<ValueNet>,
}

impl PpoOptimizer {
    pub fn new(cfg: &PpoConfig, policy: &GaussianMlpPolicy, value: &ValueNet) -> Self {
        Self {
            kind: cfg.optimizer,
            policy: Adam::new(policy, cfg.learning_rate),
            value: Adam::new(value, cfg.learning_rate),
        }
    }

    /// Ascent on the policy, descent on the value network.
    fn apply(&mut self, policy: &mut GaussianMlpPolicy, pgrad: &mut GaussianMlpPolicy, value: &mut ValueNet, vgrad: &ValueNet, lr: f64) {
        match self.kind {
            Optimizer::Sgd => {
                add_scaled(policy, pgrad, lr);
                add_scaled(value, vgrad, -lr);
            }
            Optimizer::Adam => {
                scale_all(pgrad, -1.0);
                self.policy.step(policy, pgrad);
                self.value.step(value, vgrad);
            }
        }
    }
}

fn clip_norm<P: Params>(g: &mut P, max_norm: f64) {
    let norm = global_norm(g);
    if norm > max_norm {
        scale_all(g, max_norm / norm);
    }
}

/// Clipped-surrogate epochs over shuffled minibatches. The policy and value
/// gradients are norm-clipped separately before the optimiser step.
pub fn ppo_update(
    policy: &mut GaussianMlpPolicy,
    value: &mut ValueNet,
    batch: &RolloutBatch,
    adv: &[f64],
    returns: &[f64],
    cfg: &PpoConfig,
    opt: &mut PpoOptimizer,
    seed: u64,
) -> Result<PpoStats> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if adv.len() != batch.len() || returns.len() != batch.len() {
        return Err(Error::DimensionMismatch { expected: batch.len(), got: adv.len().min(returns.len()) });
    }
    cfg.validate()?;
    let mut stats = PpoStats::default();
    let mut order: Vec<usize> = (0..batch.len()).collect();
    let (mut ratio_total, mut clipped_total, mut seen) = (0.0, 0usize, 0usize);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng_from(derive(seed, stream::SHUFFLE, u64::from(epoch))));
        for chunk in order.chunks(cfg.minibatch) {
            let mut pgrad = zeros_like(policy);
            let mut vgrad = zeros_like(value);
            let (surr, vloss, ratio_sum, clipped, max_dev) =
                ppo_gradients(policy, value, batch, adv, returns, chunk, cfg, &mut pgrad, &mut vgrad)?;
            if !(surr.is_finite() && vloss.is_finite()) {
                return Err(Error::NonFinite("ppo loss"));
            }
            if stats.updates == 0 {
                stats.first_ratio_dev = max_dev;
            }
            clip_norm(&mut pgrad, cfg.max_grad_norm);
            clip_norm(&mut vgrad, cfg.max_grad_norm);
            opt.apply(policy, &mut pgrad, value, &vgrad, cfg.learning_rate);
            stats.policy_loss += -surr;
            stats.value_loss += vloss;
            ratio_total += ratio_sum;
            clipped_total += clipped;
            seen += chunk.len();
            stats.updates += 1;
        }
    }
    if stats.updates > 0 {
        let u = f64::from(stats.updates);
        stats.policy_loss /= u;
        stats.value_loss /= u;
        stats.mean_ratio = ratio_total / seen as f64;
        stats.clip_fraction = clipped_total as f64 / seen as f64;
    }
    if policy.log_std.iter().chain(policy.mean_net.biases.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("policy parameters"));
    }
    Ok(stats)
}
