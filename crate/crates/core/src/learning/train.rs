use alloc::vec::Vec;

use libm::sqrt;

use super::env::Env;
use super::gae::compute_gae;
use super::ppo::{ppo_update, PpoConfig, PpoOptimizer, PpoStats};
use super::rollout::{collect_rollouts, RolloutBatch};
use crate::error::Result;
use crate::nets::{GaussianMlpPolicy, ValueNet};
use crate::rng::{derive, stream};

/// One row of the reward curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub iteration: u32,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub mean_episode_steps: f64,
    pub fall_fraction: f64,
}

impl CurvePoint {
    pub fn from_batch(iteration: u32, batch: &RolloutBatch) -> Self {
        let n = batch.n_episodes().max(1) as f64;
        let mean = batch.episode_returns.iter().sum::<f64>() / n;
        let var = batch.episode_returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
        let steps: usize = batch.episodes().map(|(a, b)| b - a).sum();
        let falls = batch.episode_fell.iter().filter(|f| **f).count();
        Self {
            iteration,
            mean_reward: mean,
            std_reward: sqrt(var),
            mean_episode_steps: steps as f64 / n,
            fall_fraction: falls as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub policy: GaussianMlpPolicy,
    pub value: ValueNet,
    pub curve: Vec<CurvePoint>,
}

/// Collect → advantages → PPO, `iterations` times. The curve point of an
/// iteration describes the episodes collected before its update.
pub fn train_loop(
    env: &Env,
    policy: &GaussianMlpPolicy,
    value: &ValueNet,
    cfg: &PpoConfig,
    iterations: u32,
    seed: u64,
    progress: &mut dyn FnMut(&CurvePoint, &PpoStats),
) -> Result<TrainOutput> {
    env.validate()?;
    cfg.validate()?;
    let mut policy = policy.clone();
    let mut value = value.clone();
    let mut opt = PpoOptimizer::new(cfg, &policy, &value);
    let mut curve = Vec::with_capacity(iterations as usize);
    for i in 0..iterations {
        let it_seed = derive(seed, stream::ITERATION, u64::from(i));
        let batch = collect_rollouts(env, &policy, &value, cfg.samples_per_iter, it_seed)?;
        let point = CurvePoint::from_batch(i, &batch);
        let (adv, returns) = compute_gae(&batch, cfg.gamma, cfg.lam);
        let stats = ppo_update(&mut policy, &mut value, &batch, &adv, &returns, cfg, &mut opt, it_seed)?;
        progress(&point, &stats);
        curve.push(point);
    }
    Ok(TrainOutput { policy, value, curve })
}
