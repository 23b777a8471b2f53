use alloc::vec;
use alloc::vec::Vec;

use libm::{atanh, exp, tanh};
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::mlp::{MlpParams, MlpTrace};
use super::observation::{Observation, OBS_DIM};
use super::optim::Params;
use crate::control::{foot_placement, pitch_height_grf, Action, GainName, GainSet};
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;
use crate::sim::RobotState;

pub const ACTION_DIM: usize = 3;

/// Force-level outputs (F_x, F_z, x_p).
pub const PURE_RANGES: [(f64, f64); ACTION_DIM] = [(-300.0, 300.0), (0.0, 1500.0), (-0.6, 0.6)];

/// Offsets on (theta_des, z_des, foot placement).
pub const HEURISTIC_RANGES: [(f64, f64); ACTION_DIM] = [(-0.3, 0.3), (-0.15, 0.15), (-0.2, 0.2)];

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const ATANH_CLIP: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// Network outputs ground reaction force and foot placement directly.
    PureNn,
    /// Network outputs set-points consumed by the expert feedback laws.
    HeuristicNn,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::PureNn => "pure_nn",
            PolicyKind::HeuristicNn => "heuristic_nn",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pure_nn" => Some(PolicyKind::PureNn),
            "heuristic_nn" => Some(PolicyKind::HeuristicNn),
            _ => None,
        }
    }

    pub fn default_ranges(self) -> [(f64, f64); ACTION_DIM] {
        match self {
            PolicyKind::PureNn => PURE_RANGES,
            PolicyKind::HeuristicNn => HEURISTIC_RANGES,
        }
    }
}

/// Whether to draw exploration noise or act at the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyMode {
    Sample,
    Mean,
}

/// One policy query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub action: Action,
    pub pre_squash: [f64; ACTION_DIM],
    pub logprob: f64,
}

/// Diagonal Gaussian over pre-squash actions with a state-independent std.
///
/// A `HeuristicNn` policy carries its own gain snapshot; a `PureNn` one does not.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMlpPolicy {
    pub mean_net: MlpParams,
    pub log_std: Vec<f64>,
    pub kind: PolicyKind,
    pub output_ranges: Vec<(f64, f64)>,
    pub gains: Option<GainSet>,
}

impl Params for GaussianMlpPolicy {
    fn slices(&self) -> Vec<&[f64]> {
        let mut v = self.mean_net.slices();
        v.push(&self.log_std);
        v
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut v = self.mean_net.slices_mut();
        v.push(&mut self.log_std);
        v
    }
}

impl GaussianMlpPolicy {
    /// Random hidden layers and a zero output layer, so a fresh policy acts at
    /// the range midpoints (for `HeuristicNn`: exactly the expert).
    pub fn new(kind: PolicyKind, hidden: &[usize], log_std_init: f64, gains: &GainSet, rng: &mut Rng) -> Result<Self> {
        let mut sizes = vec![OBS_DIM];
        sizes.extend_from_slice(hidden);
        sizes.push(ACTION_DIM);
        let mut mean_net = MlpParams::random(&sizes, rng)?;
        let last = mean_net.n_layers() - 1;
        mean_net.weights[last].fill(0.0);
        let policy = Self {
            mean_net,
            log_std: vec![log_std_init; ACTION_DIM],
            kind,
            output_ranges: kind.default_ranges().to_vec(),
            gains: (kind == PolicyKind::HeuristicNn).then_some(*gains),
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        self.mean_net.validate()?;
        if self.mean_net.input_dim() != OBS_DIM {
            return Err(Error::DimensionMismatch { expected: OBS_DIM, got: self.mean_net.input_dim() });
        }
        let m = self.mean_net.output_dim();
        if m != ACTION_DIM {
            return Err(Error::DimensionMismatch { expected: ACTION_DIM, got: m });
        }
        if self.log_std.len() != m || self.output_ranges.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: self.log_std.len().min(self.output_ranges.len()) });
        }
        if self.log_std.iter().any(|v| !v.is_finite() || exp(*v) <= 0.0) {
            return Err(invalid("log_std", "std must be finite and > 0"));
        }
        if self.output_ranges.iter().any(|&(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(invalid("output_ranges", "need finite low < high"));
        }
        match (self.kind, &self.gains) {
            (PolicyKind::HeuristicNn, Some(g)) => g.validate(),
            (PolicyKind::HeuristicNn, None) => Err(invalid("gains", "heuristic policy needs a gain snapshot")),
            (PolicyKind::PureNn, Some(_)) => Err(invalid("gains", "pure policy carries no gains")),
            (PolicyKind::PureNn, None) => Ok(()),
        }
    }

    pub fn mean(&self, obs: &Observation) -> Result<Vec<f64>> {
        self.mean_net.forward(obs.as_slice())
    }

    /// `mid + half·tanh(u)` per dimension.
    pub fn squash(&self, pre: &[f64]) -> Vec<f64> {
        pre.iter().zip(&self.output_ranges).map(|(&u, &(lo, hi))| squash1(u, lo, hi)).collect()
    }

    /// Inverse of [`squash`](Self::squash), clipped away from the saturated ends.
    pub fn unsquash(&self, action: &[f64]) -> Vec<f64> {
        action
            .iter()
            .zip(&self.output_ranges)
            .map(|(&a, &(lo, hi))| {
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                atanh(((a - mid) / half).clamp(-ATANH_CLIP, ATANH_CLIP))
            })
            .collect()
    }

    pub fn logprob(&self, obs: &Observation, pre_squash: &[f64]) -> Result<f64> {
        if pre_squash.len() != self.log_std.len() {
            return Err(Error::DimensionMismatch { expected: self.log_std.len(), got: pre_squash.len() });
        }
        let mean = self.mean(obs)?;
        Ok(gaussian_logprob(&mean, &self.log_std, pre_squash))
    }

    /// Forward pass kept in `trace` for a following
    /// [`logprob_backward`](Self::logprob_backward).
    pub fn logprob_traced(&self, obs: &Observation, pre_squash: &[f64], trace: &mut MlpTrace) -> Result<f64> {
        if pre_squash.len() != self.log_std.len() {
            return Err(Error::DimensionMismatch { expected: self.log_std.len(), got: pre_squash.len() });
        }
        self.mean_net.forward_into(obs.as_slice(), trace)?;
        Ok(gaussian_logprob(trace.output(), &self.log_std, pre_squash))
    }

    /// Adds `weight · ∇ logprob` to `grad`, using the pass stored in `trace`.
    pub fn logprob_backward(
        &self,
        pre_squash: &[f64],
        weight: f64,
        trace: &MlpTrace,
        grad: &mut GaussianMlpPolicy,
    ) -> Result<()> {
        let mean = trace.output();
        let mut upstream = [0.0; ACTION_DIM];
        for i in 0..ACTION_DIM {
            let inv_var = exp(-2.0 * self.log_std[i]);
            let d = pre_squash[i] - mean[i];
            upstream[i] = weight * d * inv_var;
            grad.log_std[i] += weight * (d * d * inv_var - 1.0);
        }
        self.mean_net.backward(trace, &upstream, &mut grad.mean_net)?;
        Ok(())
    }

    /// Adds `weight · ∇ logprob` to `grad` and returns the log-probability.
    pub fn logprob_grad(
        &self,
        obs: &Observation,
        pre_squash: &[f64],
        weight: f64,
        grad: &mut GaussianMlpPolicy,
        trace: &mut MlpTrace,
    ) -> Result<f64> {
        let lp = self.logprob_traced(obs, pre_squash, trace)?;
        self.logprob_backward(pre_squash, weight, trace, grad)?;
        Ok(lp)
    }

    /// Pre-squash sample (or mean) with its log-probability.
    pub fn draw(&self, obs: &Observation, mode: PolicyMode, rng: &mut Rng) -> Result<([f64; ACTION_DIM], f64)> {
        let mean = self.mean(obs)?;
        let mut pre = [0.0; ACTION_DIM];
        for i in 0..ACTION_DIM {
            pre[i] = match mode {
                PolicyMode::Sample => {
                    let eps: f64 = rng.sample(StandardNormal);
                    mean[i] + exp(self.log_std[i]) * eps
                }
                PolicyMode::Mean => mean[i],
            };
        }
        Ok((pre, gaussian_logprob(&mean, &self.log_std, &pre)))
    }

    /// Full decision: draw, squash and (for `HeuristicNn`) pass through the
    /// feedback laws with the policy's own gains.
    pub fn act(&self, obs: &Observation, state: &RobotState, mode: PolicyMode, rng: &mut Rng) -> Result<Decision> {
        let (pre, logprob) = self.draw(obs, mode, rng)?;
        let out = self.squash(&pre);
        let action = match (self.kind, &self.gains) {
            (PolicyKind::PureNn, _) => Action::from_slice(&out),
            (PolicyKind::HeuristicNn, Some(g)) => heuristic_law(&out, state, g),
            (PolicyKind::HeuristicNn, None) => return Err(invalid("gains", "heuristic policy needs a gain snapshot")),
        };
        Ok(Decision { action, pre_squash: pre, logprob })
    }

    /// Gains used by the swing pipeline: the policy's own if it has them.
    pub fn pipeline_gains<'a>(&'a self, fallback: &'a GainSet) -> &'a GainSet {
        self.gains.as_ref().unwrap_or(fallback)
    }

    /// Copy with one embedded gain changed and the network untouched.
    pub fn with_gain(&self, name: GainName, value: f64) -> Result<Self> {
        let Some(mut g) = self.gains else {
            return Err(Error::KindMismatch { expected: PolicyKind::HeuristicNn.as_str(), got: self.kind.as_str() });
        };
        g.set(name, value);
        g.validate()?;
        Ok(Self { gains: Some(g), ..self.clone() })
    }
}

fn squash1(u: f64, lo: f64, hi: f64) -> f64 {
    0.5 * (lo + hi) + 0.5 * (hi - lo) * tanh(u)
}

fn gaussian_logprob(mean: &[f64], log_std: &[f64], x: &[f64]) -> f64 {
    let mut lp = 0.0;
    for i in 0..x.len() {
        let z = (x[i] - mean[i]) * exp(-log_std[i]);
        lp += -0.5 * z * z - log_std[i] - 0.5 * LN_2PI;
    }
    lp
}

/// Set-point offsets → (F_x, F_z, x_p) via the expert's PD and placement laws.
fn heuristic_law(offsets: &[f64], state: &RobotState, gains: &GainSet) -> Action {
    let theta_nn = gains.theta_des + offsets[0];
    let z_nn = gains.z_des + offsets[1];
    let (fx, fz) = pitch_height_grf(theta_nn, z_nn, state.pitch, state.pitch_rate, state.height(), state.dz, gains);
    Action { fx, fz, x_p: foot_placement(state.dx, gains) + offsets[2] }
}

pub fn policy_logprob(policy: &GaussianMlpPolicy, obs: &Observation, pre_squash: &[f64]) -> Result<f64> {
    policy.logprob(obs, pre_squash)
}

/// Returns (squashed action, pre-squash sample, logprob).
pub fn policy_sample(
    policy: &GaussianMlpPolicy,
    obs: &Observation,
    rng: &mut Rng,
) -> Result<(Vec<f64>, [f64; ACTION_DIM], f64)> {
    let (pre, lp) = policy.draw(obs, PolicyMode::Sample, rng)?;
    Ok((policy.squash(&pre), pre, lp))
}

pub fn pure_nn_action(policy: &GaussianMlpPolicy, obs: &Observation, mode: PolicyMode, rng: &mut Rng) -> Result<Decision> {
    if policy.kind != PolicyKind::PureNn {
        return Err(Error::KindMismatch { expected: PolicyKind::PureNn.as_str(), got: policy.kind.as_str() });
    }
    let (pre, logprob) = policy.draw(obs, mode, rng)?;
    Ok(Decision { action: Action::from_slice(&policy.squash(&pre)), pre_squash: pre, logprob })
}

/// Heuristic decision using the supplied gains rather than the embedded ones.
pub fn heuristic_nn_action(
    policy: &GaussianMlpPolicy,
    obs: &Observation,
    state: &RobotState,
    gains: &GainSet,
    mode: PolicyMode,
    rng: &mut Rng,
) -> Result<Decision> {
    if policy.kind != PolicyKind::HeuristicNn {
        return Err(Error::KindMismatch { expected: PolicyKind::HeuristicNn.as_str(), got: policy.kind.as_str() });
    }
    let (pre, logprob) = policy.draw(obs, mode, rng)?;
    Ok(Decision { action: heuristic_law(&policy.squash(&pre), state, gains), pre_squash: pre, logprob })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::expert_action;
    use crate::rng::rng_from;
    use crate::sim::{initial_state, InitMode, SimParams};

    fn policy(kind: PolicyKind) -> GaussianMlpPolicy {
        GaussianMlpPolicy::new(kind, &[16, 16], -1.0, &GainSet::default(), &mut rng_from(3)).unwrap()
    }

    fn obs() -> Observation {
        Observation::from_raw([0.05, 0.3, 0.88, -0.1, 0.02, 0.3])
    }

    #[test]
    fn logprob_at_mean_standard_normal() {
        let mut p = policy(PolicyKind::PureNn);
        p.log_std = vec![0.0; 3];
        let m = p.mean(&obs()).unwrap();
        let lp = p.logprob(&obs(), &m).unwrap();
        assert!((lp + 1.5 * LN_2PI).abs() < 1e-12);
    }

    #[test]
    fn logprob_one_dim_value() {
        assert!((gaussian_logprob(&[0.0], &[0.0], &[2.0]) - (-2.918_938_533_204_672_7)).abs() < 1e-12);
    }

    #[test]
    fn zero_network_gives_midpoints() {
        let p = policy(PolicyKind::PureNn);
        let d = pure_nn_action(&p, &obs(), PolicyMode::Mean, &mut rng_from(0)).unwrap();
        assert_eq!(d.action, Action { fx: 0.0, fz: 750.0, x_p: 0.0 });
    }

    #[test]
    fn saturation_reaches_bounds() {
        let p = policy(PolicyKind::PureNn);
        assert_eq!(p.squash(&[1e3, 1e3, 1e3]), vec![300.0, 1500.0, 0.6]);
        assert_eq!(p.squash(&[-1e3, -1e3, -1e3]), vec![-300.0, 0.0, -0.6]);
    }

    #[test]
    fn unsquash_inverts_inside_clip() {
        let p = policy(PolicyKind::PureNn);
        let a = [120.0, 900.0, -0.1];
        let back = p.squash(&p.unsquash(&a));
        for (x, y) in a.iter().zip(back) {
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
        let edge = p.unsquash(&[300.0, 0.0, 0.6]);
        assert!(edge.iter().all(|v| v.abs() <= atanh(ATANH_CLIP) + 1e-15));
    }

    #[test]
    fn zero_heuristic_matches_expert() {
        let p = policy(PolicyKind::HeuristicNn);
        let params = SimParams::default();
        let mut s = initial_state(&params, 0.87, InitMode::UnloadedDrop);
        s.dx = 0.31;
        s.pitch = -0.04;
        s.pitch_rate = 0.2;
        let g = GainSet::default();
        let d = p.act(&Observation::from_state(&s), &s, PolicyMode::Mean, &mut rng_from(0)).unwrap();
        assert_eq!(d.action, expert_action(&s, &g));
    }

    #[test]
    fn kind_mismatch() {
        let p = policy(PolicyKind::HeuristicNn);
        assert!(matches!(pure_nn_action(&p, &obs(), PolicyMode::Mean, &mut rng_from(0)), Err(Error::KindMismatch { .. })));
        let q = policy(PolicyKind::PureNn);
        assert!(q.with_gain(GainName::K, 0.3).is_err());
        let s = initial_state(&SimParams::default(), 0.9, InitMode::UnloadedDrop);
        assert!(heuristic_nn_action(&q, &obs(), &s, &GainSet::default(), PolicyMode::Mean, &mut rng_from(0)).is_err());
    }

    #[test]
    fn sample_logprob_self_consistent() {
        let p = policy(PolicyKind::PureNn);
        let mut rng = rng_from(9);
        for _ in 0..20 {
            let (_, pre, lp) = policy_sample(&p, &obs(), &mut rng).unwrap();
            assert_eq!(lp, p.logprob(&obs(), &pre).unwrap());
        }
        let a = policy_sample(&p, &obs(), &mut rng_from(5)).unwrap();
        let b = policy_sample(&p, &obs(), &mut rng_from(5)).unwrap();
        assert_eq!(a, b);
    }
}
