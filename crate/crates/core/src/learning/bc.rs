use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::env::{run_episode, Controller, Env};
use super::rollout::episode_seed;
use crate::control::Action;
use crate::error::{invalid, Error, Result};
use crate::nets::{zeros_like, Adam, GaussianMlpPolicy, MlpTrace, Observation, ValueNet};
use crate::rng::{derive, rng_from, stream};

/// Expert state-action pairs with rewards, in episode order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpertData {
    pub obs: Vec<Observation>,
    pub actions: Vec<Action>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
}

impl ExpertData {
    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    fn check(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n = self.len();
        for len in [self.actions.len(), self.rewards.len(), self.dones.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        Ok(())
    }

    /// Splits off every `k`-th sample, e.g. `k = 10` for a 10% holdout.
    pub fn split_every(&self, k: usize) -> (ExpertData, ExpertData) {
        let (mut train, mut hold) = (ExpertData::default(), ExpertData::default());
        for i in 0..self.len() {
            let dst = if k > 0 && i % k == k - 1 { &mut hold } else { &mut train };
            dst.obs.push(self.obs[i]);
            dst.actions.push(self.actions[i]);
            dst.rewards.push(self.rewards[i]);
            dst.dones.push(self.dones[i]);
        }
        (train, hold)
    }
}

/// Runs the expert in `env` until at least `n_min` pairs are recorded.
pub fn collect_expert_data(env: &Env, n_min: usize, seed: u64) -> Result<ExpertData> {
    if n_min == 0 {
        return Err(invalid("n_min", "must be > 0"));
    }
    let mut data = ExpertData::default();
    let mut index = 0;
    while data.len() < n_min {
        run_episode(env, Controller::Expert, episode_seed(seed, index), &mut |rec| {
            data.obs.push(*rec.obs);
            data.actions.push(*rec.action);
            data.rewards.push(rec.reward);
            data.dones.push(rec.done);
        })?;
        index += 1;
    }
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcConfig {
    pub learning_rate: f64,
    pub epochs: u32,
    pub minibatch: usize,
    pub seed: u64,
}

impl Default for BcConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, epochs: 30, minibatch: 256, seed: 0 }
    }
}

/// Expert actions in the policy's pre-squash space.
fn targets(data: &ExpertData, policy: &GaussianMlpPolicy) -> Vec<Vec<f64>> {
    data.actions.iter().map(|a| policy.unsquash(&a.to_array())).collect()
}

/// Mean negative log-likelihood of the expert actions.
pub fn bc_loss(policy: &GaussianMlpPolicy, data: &ExpertData) -> Result<f64> {
    data.check()?;
    let mut total = 0.0;
    for (obs, pre) in data.obs.iter().zip(targets(data, policy)) {
        total -= policy.logprob(obs, &pre)?;
    }
    Ok(total / data.len() as f64)
}

/// Gradient of [`bc_loss`] over `indices` (all samples when `None`).
pub fn bc_gradient(policy: &GaussianMlpPolicy, data: &ExpertData, indices: Option<&[usize]>) -> Result<GaussianMlpPolicy> {
    data.check()?;
    let all: Vec<usize>;
    let idx = match indices {
        Some(i) => i,
        None => {
            all = (0..data.len()).collect();
            &all
        }
    };
    let mut grad = zeros_like(policy);
    let mut trace = MlpTrace::default();
    let w = -1.0 / idx.len() as f64;
    for &i in idx {
        let pre = policy.unsquash(&data.actions[i].to_array());
        policy.logprob_grad(&data.obs[i], &pre, w, &mut grad, &mut trace)?;
    }
    Ok(grad)
}

/// Maximum-likelihood fit of mean and std to expert actions (Adam on
/// shuffled minibatches).
pub fn behavior_clone(data: &ExpertData, policy: &GaussianMlpPolicy, cfg: &BcConfig) -> Result<GaussianMlpPolicy> {
    data.check()?;
    if cfg.minibatch == 0 {
        return Err(invalid("minibatch", "must be > 0"));
    }
    let mut p = policy.clone();
    let targets = targets(data, policy);
    let mut opt = Adam::new(&p, cfg.learning_rate);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = MlpTrace::default();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng_from(derive(cfg.seed, stream::SHUFFLE, u64::from(epoch))));
        for chunk in order.chunks(cfg.minibatch) {
            let mut grad = zeros_like(&p);
            let w = -1.0 / chunk.len() as f64;
            for &i in chunk {
                p.logprob_grad(&data.obs[i], &targets[i], w, &mut grad, &mut trace)?;
            }
            opt.step(&mut p, &grad);
        }
    }
    p.validate()?;
    Ok(p)
}

/// Mean squared action error at the policy mean, per dimension divided by the
/// squared half-range so all three outputs weigh the same.
pub fn action_mse(policy: &GaussianMlpPolicy, data: &ExpertData) -> Result<f64> {
    data.check()?;
    let mut total = 0.0;
    for (obs, a) in data.obs.iter().zip(&data.actions) {
        let out = policy.squash(&policy.mean(obs)?);
        for ((o, t), (lo, hi)) in out.iter().zip(a.to_array()).zip(&policy.output_ranges) {
            let half = 0.5 * (hi - lo);
            total += ((o - t) / half) * ((o - t) / half);
        }
    }
    Ok(total / data.len() as f64)
}

/// Mean squared TD error `(V(s_t) − r_t − γ·V(s_{t+1})·(1 − done))²`.
pub fn td_loss(value: &ValueNet, data: &ExpertData, gamma: f64) -> Result<f64> {
    data.check()?;
    let v: Vec<f64> = data.obs.iter().map(|o| value.value(o)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for t in 0..data.len() {
        let e = td_error(&v, data, t, gamma);
        total += e * e;
    }
    Ok(total / data.len() as f64)
}

fn td_error(v: &[f64], data: &ExpertData, t: usize, gamma: f64) -> f64 {
    let next = if data.dones[t] || t + 1 == data.len() { 0.0 } else { v[t + 1] };
    v[t] - data.rewards[t] - gamma * next
}

/// Full (residual) gradient of [`td_loss`] over the samples in `indices`,
/// normalised by the dataset size.
pub fn td_gradient(value: &ValueNet, data: &ExpertData, gamma: f64, indices: Option<&[usize]>) -> Result<ValueNet> {
    data.check()?;
    let n = data.len();
    let mut grad = zeros_like(value);
    let mut trace = MlpTrace::default();
    let all: Vec<usize>;
    let idx = match indices {
        Some(i) => i,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    let w = 2.0 / idx.len() as f64;
    for &t in idx {
        let vt = value.value_traced(&data.obs[t], &mut trace)?;
        let bootstrap = !(data.dones[t] || t + 1 == n);
        let vn = if bootstrap { value.value(&data.obs[t + 1])? } else { 0.0 };
        let e = vt - data.rewards[t] - gamma * vn;
        value.value_backward(w * e, &trace, &mut grad)?;
        if bootstrap {
            value.value_grad(&data.obs[t + 1], -w * e * gamma, &mut grad, &mut trace)?;
        }
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValuePretrainConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub epochs: u32,
    pub minibatch: usize,
    pub seed: u64,
}

impl Default for ValuePretrainConfig {
    fn default() -> Self {
        Self { gamma: 0.99, learning_rate: 1e-3, epochs: 20, minibatch: 256, seed: 0 }
    }
}

/// Minimises the TD loss on expert data (Adam, residual gradient).
pub fn value_pretrain(data: &ExpertData, value: &ValueNet, cfg: &ValuePretrainConfig) -> Result<ValueNet> {
    data.check()?;
    if cfg.minibatch == 0 {
        return Err(invalid("minibatch", "must be > 0"));
    }
    let mut v = value.clone();
    let mut opt = Adam::new(&v, cfg.learning_rate);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng_from(derive(cfg.seed, stream::SHUFFLE, u64::from(epoch))));
        for chunk in order.chunks(cfg.minibatch) {
            let grad = td_gradient(&v, data, cfg.gamma, Some(chunk))?;
            opt.step(&mut v, &grad);
        }
    }
    v.validate()?;
    Ok(v)
}
