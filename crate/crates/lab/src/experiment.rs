//! Multi-step recipes shared by the CLI and the acceptance runs.

use biped_core::learning::{
    behavior_clone, collect_expert_data, run_episode, value_pretrain, Controller, Env, ExpertData,
};
use biped_core::nets::{GaussianMlpPolicy, PolicyKind, PolicyMode, ValueNet};
use biped_core::rng::{derive, stream};
use biped_core::transfer::eval_episode_seed;

use crate::config::ExperimentConfig;
use crate::error::LabResult;

/// Expert transitions on the configured nominal terrain.
pub fn expert_data(cfg: &ExperimentConfig, seed: u64) -> LabResult<ExpertData> {
    Ok(collect_expert_data(&cfg.env(cfg.run.terrain), cfg.run.expert_samples, seed)?)
}

/// Pure policies are cloned from the expert (then get `log_std_init` back);
/// heuristic policies start at zero network output, which is the expert.
pub fn initial_policy(cfg: &ExperimentConfig, data: &ExpertData, seed: u64) -> LabResult<GaussianMlpPolicy> {
    let fresh = cfg.new_policy(seed)?;
    match fresh.kind {
        PolicyKind::HeuristicNn => Ok(fresh),
        PolicyKind::PureNn => {
            let mut p = behavior_clone(data, &fresh, &cfg.bc_config(seed))?;
            p.log_std = vec![cfg.policy.log_std_init; p.log_std.len()];
            Ok(p)
        }
    }
}

pub fn initial_value(cfg: &ExperimentConfig, data: &ExpertData, seed: u64) -> LabResult<ValueNet> {
    Ok(value_pretrain(data, &cfg.new_value(seed)?, &cfg.value_pretrain_config(seed))?)
}

/// Policy and value network ready for PPO.
pub fn initial_models(cfg: &ExperimentConfig, seed: u64) -> LabResult<(GaussianMlpPolicy, ValueNet)> {
    let data = expert_data(cfg, derive(seed, stream::EPISODE, u64::MAX))?;
    Ok((initial_policy(cfg, &data, seed)?, initial_value(cfg, &data, seed)?))
}

/// Mean total reward of episodes with sampled actions, as seen during training.
pub fn sampled_return(env: &Env, policy: &GaussianMlpPolicy, episodes: u32, seed: u64) -> LabResult<f64> {
    let mut total = 0.0;
    for i in 0..episodes {
        let s = run_episode(env, Controller::Policy(policy, PolicyMode::Sample), eval_episode_seed(seed, u64::from(i)), &mut |_| {})?;
        total += s.total_reward;
    }
    Ok(total / f64::from(episodes.max(1)))
}
