use alloc::vec::Vec;

use super::env::{run_episode, Controller, Env};
use crate::error::{invalid, Result};
use crate::nets::{GaussianMlpPolicy, Observation, PolicyMode, ValueNet, ACTION_DIM};
use crate::rng::{derive, stream};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Observation,
    pub pre_squash: [f64; ACTION_DIM],
    pub logprob: f64,
    pub reward: f64,
    pub value: f64,
    pub done: bool,
    pub fell: bool,
}

/// Whole episodes, stored back to back.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutBatch {
    pub transitions: Vec<Transition>,
    /// Exclusive end index of each episode in `transitions`.
    pub episode_ends: Vec<usize>,
    pub episode_returns: Vec<f64>,
    pub episode_fell: Vec<bool>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn n_episodes(&self) -> usize {
        self.episode_ends.len()
    }

    /// `(start, end)` index ranges of the episodes.
    pub fn episodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let starts = core::iter::once(0).chain(self.episode_ends.iter().copied());
        starts.zip(self.episode_ends.iter().copied())
    }
}

/// Seed of episode `index` within a collection seeded by `seed`.
pub fn episode_seed(seed: u64, index: u64) -> u64 {
    derive(seed, stream::EPISODE, index)
}

/// Samples whole episodes until at least `n_min` transitions are stored.
pub fn collect_rollouts(
    env: &Env,
    policy: &GaussianMlpPolicy,
    value: &ValueNet,
    n_min: usize,
    seed: u64,
) -> Result<RolloutBatch> {
    if n_min == 0 {
        return Err(invalid("n_min", "must be > 0"));
    }
    let mut batch = RolloutBatch::default();
    let mut index = 0;
    while batch.len() < n_min {
        let mut err = None;
        let summary = run_episode(env, Controller::Policy(policy, PolicyMode::Sample), episode_seed(seed, index), &mut |rec| {
            if err.is_some() {
                return;
            }
            let Some(d) = rec.decision else { return };
            match value.value(rec.obs) {
                Ok(v) => batch.transitions.push(Transition {
                    obs: *rec.obs,
                    pre_squash: d.pre_squash,
                    logprob: d.logprob,
                    reward: rec.reward,
                    value: v,
                    done: rec.done,
                    fell: rec.fell,
                }),
                Err(e) => err = Some(e),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        batch.episode_ends.push(batch.len());
        batch.episode_returns.push(summary.total_reward);
        batch.episode_fell.push(summary.fell);
        index += 1;
    }
    Ok(batch)
}
