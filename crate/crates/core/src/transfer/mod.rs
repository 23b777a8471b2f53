//! Sim-to-sim transfer: a deliberately mis-modelled "hardware" environment,
//! mean-action evaluation, transfer reports and gain retuning of heuristic
//! policies.

use alloc::vec::Vec;

use crate::control::GainName;
use crate::error::{invalid, Result};
use crate::learning::{run_episode, Controller, Env};
use crate::nets::{GaussianMlpPolicy, PolicyKind, PolicyMode, OBS_DIM};
use crate::rng::{derive, stream};
use crate::sim::{InitMode, SimParams};

/// How the surrogate differs from the training simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub init_mode: InitMode,
    pub mass_scale: f64,
    pub inertia_scale: f64,
    pub hip_lag_scale: f64,
    pub spring_k_scale: f64,
    /// Per-channel observation noise std in physical units.
    pub sensor_noise_std: [f64; OBS_DIM],
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            init_mode: InitMode::PreloadedLowered,
            mass_scale: 1.05,
            inertia_scale: 1.05,
            hip_lag_scale: 2.0,
            spring_k_scale: 0.9,
            sensor_noise_std: [0.0; OBS_DIM],
        }
    }
}

impl PerturbationSpec {
    /// No perturbation at all.
    pub fn identity() -> Self {
        Self {
            init_mode: InitMode::UnloadedDrop,
            mass_scale: 1.0,
            inertia_scale: 1.0,
            hip_lag_scale: 1.0,
            spring_k_scale: 1.0,
            sensor_noise_std: [0.0; OBS_DIM],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass_scale", self.mass_scale),
            ("inertia_scale", self.inertia_scale),
            ("hip_lag_scale", self.hip_lag_scale),
            ("spring_k_scale", self.spring_k_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, "must be finite and > 0"));
            }
        }
        if self.sensor_noise_std.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(invalid("sensor_noise_std", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Scaled parameters plus the start mode of the surrogate.
pub fn make_surrogate(params: &SimParams, spec: &PerturbationSpec) -> (SimParams, InitMode) {
    let mut p = *params;
    p.mass *= spec.mass_scale;
    p.inertia *= spec.inertia_scale;
    p.hip_lag *= spec.hip_lag_scale;
    p.spring_k *= spec.spring_k_scale;
    (p, spec.init_mode)
}

/// `env` with the perturbation applied; terrain, gains and reward unchanged.
pub fn surrogate_env(env: &Env, spec: &PerturbationSpec) -> Result<Env> {
    spec.validate()?;
    let (params, init_mode) = make_surrogate(&env.params, spec);
    let mut noise = env.sensor_noise_std;
    for (n, s) in noise.iter_mut().zip(spec.sensor_noise_std) {
        *n += s;
    }
    let out = Env { params, init_mode, sensor_noise_std: noise, ..env.clone() };
    out.validate()?;
    Ok(out)
}

/// Outcome of evaluating one controller for a number of episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalStats {
    pub n_episodes: u32,
    pub n_success: u32,
    pub success_rate: f64,
    pub mean_reward: f64,
    pub mean_steps: f64,
    /// Step index of every fall, in episode order.
    pub fall_steps: Vec<u32>,
}

impl EvalStats {
    /// Fall counts per bin of `bin` steps, covering `[0, max_steps)`.
    pub fn fall_histogram(&self, bin: u32, max_steps: u32) -> Vec<u32> {
        let bin = bin.max(1);
        let mut h = alloc::vec![0; max_steps.div_ceil(bin) as usize];
        for &s in &self.fall_steps {
            let i = ((s.saturating_sub(1)) / bin) as usize;
            if let Some(c) = h.get_mut(i) {
                *c += 1;
            }
        }
        h
    }
}

/// Seed of evaluation episode `index`.
pub fn eval_episode_seed(seed: u64, index: u64) -> u64 {
    derive(seed, stream::EPISODE, index)
}

/// Runs `n_episodes` episodes; success means no fall within the episode cap.
pub fn evaluate(env: &Env, controller: Controller<'_>, n_episodes: u32, seed: u64) -> Result<EvalStats> {
    if n_episodes == 0 {
        return Err(invalid("n_episodes", "must be > 0"));
    }
    let mut stats = EvalStats {
        n_episodes,
        n_success: 0,
        success_rate: 0.0,
        mean_reward: 0.0,
        mean_steps: 0.0,
        fall_steps: Vec::new(),
    };
    for i in 0..n_episodes {
        let s = run_episode(env, controller, eval_episode_seed(seed, u64::from(i)), &mut |_| {})?;
        if s.fell {
            stats.fall_steps.push(s.steps);
        } else {
            stats.n_success += 1;
        }
        stats.mean_reward += s.total_reward;
        stats.mean_steps += f64::from(s.steps);
    }
    let n = f64::from(n_episodes);
    stats.success_rate = f64::from(stats.n_success) / n;
    stats.mean_reward /= n;
    stats.mean_steps /= n;
    Ok(stats)
}

/// [`evaluate`] at the policy mean (no exploration noise).
pub fn evaluate_policy(env: &Env, policy: &GaussianMlpPolicy, n_episodes: u32, seed: u64) -> Result<EvalStats> {
    evaluate(env, Controller::Policy(policy, PolicyMode::Mean), n_episodes, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvLabel {
    Nominal,
    Surrogate,
}

impl EnvLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvLabel::Nominal => "nominal",
            EnvLabel::Surrogate => "surrogate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRow {
    pub policy_id: usize,
    pub kind: PolicyKind,
    pub env: EnvLabel,
    pub stats: EvalStats,
}

/// Pooled success over every episode of every policy of one kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindRate {
    pub kind: PolicyKind,
    pub env: EnvLabel,
    pub n_episodes: u32,
    pub n_success: u32,
    pub success_rate: f64,
    /// Policies that succeeded in at least half of their episodes.
    pub policies_transferred: u32,
    pub n_policies: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub rows: Vec<TransferRow>,
    pub aggregate: Vec<KindRate>,
}

impl TransferReport {
    pub fn rate(&self, kind: PolicyKind, env: EnvLabel) -> Option<f64> {
        self.aggregate.iter().find(|r| r.kind == kind && r.env == env).map(|r| r.success_rate)
    }
}

/// Evaluates every policy on both environments with the same episode seeds.
pub fn transfer_experiment(
    policies: &[GaussianMlpPolicy],
    nominal: &Env,
    surrogate: &Env,
    n_episodes: u32,
    seed: u64,
) -> Result<TransferReport> {
    let mut rows = Vec::new();
    for (id, p) in policies.iter().enumerate() {
        for (label, env) in [(EnvLabel::Nominal, nominal), (EnvLabel::Surrogate, surrogate)] {
            let stats = evaluate_policy(env, p, n_episodes, seed)?;
            rows.push(TransferRow { policy_id: id, kind: p.kind, env: label, stats });
        }
    }
    let mut aggregate = Vec::new();
    for kind in [PolicyKind::PureNn, PolicyKind::HeuristicNn] {
        for env in [EnvLabel::Nominal, EnvLabel::Surrogate] {
            let mine: Vec<&TransferRow> = rows.iter().filter(|r| r.kind == kind && r.env == env).collect();
            if mine.is_empty() {
                continue;
            }
            let n_episodes: u32 = mine.iter().map(|r| r.stats.n_episodes).sum();
            let n_success: u32 = mine.iter().map(|r| r.stats.n_success).sum();
            aggregate.push(KindRate {
                kind,
                env,
                n_episodes,
                n_success,
                success_rate: f64::from(n_success) / f64::from(n_episodes),
                policies_transferred: mine.iter().filter(|r| 2 * r.stats.n_success >= r.stats.n_episodes).count() as u32,
                n_policies: mine.len() as u32,
            });
        }
    }
    Ok(TransferReport { rows, aggregate })
}

/// New embedded gain, identical network. Only heuristic policies have gains.
pub fn retune_gain(policy: &GaussianMlpPolicy, name: GainName, value: f64) -> Result<GaussianMlpPolicy> {
    policy.with_gain(name, value)
}
