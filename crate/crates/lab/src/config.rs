//! Experiment configuration: `key = value` lines under `[section]` headers,
//! `#` starts a comment, SI units. Missing keys keep their defaults.

use std::fmt::Write as _;
use std::path::Path;

use biped_core::control::{GainName, GainSet};
use biped_core::learning::{BcConfig, Env, Optimizer, PpoConfig, RewardConfig, TerrainChoice, ValuePretrainConfig};
use biped_core::nets::{GaussianMlpPolicy, PolicyKind, ValueNet, OBS_DIM};
use biped_core::rng::{derive, rng_from, stream};
use biped_core::sim::{InitMode, SimParams, TerrainSpec};
use biped_core::transfer::{surrogate_env, PerturbationSpec};

use crate::error::{io_err, LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainKind {
    Flat,
    Rough,
}

impl TerrainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TerrainKind::Flat => "flat",
            TerrainKind::Rough => "rough",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "flat" => Some(TerrainKind::Flat),
            "rough" => Some(TerrainKind::Rough),
            _ => None,
        }
    }
}

/// Architecture and initialization of a fresh policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub hidden: Vec<usize>,
    pub log_std_init: f64,
    /// `None` keeps the default ranges of `kind`.
    pub ranges: Option<Vec<(f64, f64)>>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self { kind: PolicyKind::PureNn, hidden: vec![64, 64], log_std_init: -1.0, ranges: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub iterations: u32,
    pub episodes: u32,
    pub out_dir: String,
    /// Terrain of the nominal environment.
    pub terrain: TerrainKind,
    /// Expert transitions collected for cloning and value pretraining.
    pub expert_samples: usize,
    pub bc_epochs: u32,
    pub bc_learning_rate: f64,
    pub value_epochs: u32,
    pub value_learning_rate: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 100,
            episodes: 10,
            out_dir: "out".into(),
            terrain: TerrainKind::Rough,
            expert_samples: 50_000,
            bc_epochs: 20,
            bc_learning_rate: 1e-3,
            value_epochs: 5,
            value_learning_rate: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sim: SimParams,
    pub gains: GainSet,
    pub policy: PolicyConfig,
    pub reward: RewardConfig,
    pub ppo: PpoConfig,
    pub terrain: TerrainSpec,
    pub surrogate: PerturbationSpec,
    pub run: RunConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sim: SimParams::default(),
            gains: GainSet::default(),
            policy: PolicyConfig::default(),
            reward: RewardConfig::default(),
            ppo: PpoConfig::default(),
            terrain: TerrainSpec::default(),
            surrogate: PerturbationSpec::default(),
            run: RunConfig::default(),
        }
    }
}

pub const SECTIONS: [&str; 8] = ["sim", "gains", "policy", "reward", "ppo", "terrain", "surrogate", "run"];

pub fn parse_config(text: &str) -> LabResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut section: Option<String> = None;
    let mut seen: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| LabError::Parse { line, message: "unterminated section header".into() })?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(LabError::Parse { line, message: format!("unknown section [{name}]") });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| LabError::Parse { line, message: "expected `key = value`".into() })?;
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.as_deref() else {
            return Err(LabError::Parse { line, message: "key outside of any section".into() });
        };
        if seen.iter().any(|(s, k)| s == sec && k == key) {
            return Err(LabError::Parse { line, message: format!("duplicate key `{key}`") });
        }
        match set(&mut cfg, sec, key, value) {
            Ok(true) => seen.push((sec.to_string(), key.to_string())),
            Ok(false) => {
                return Err(LabError::UnknownKey { line, section: sec.to_string(), key: key.to_string() })
            }
            Err(message) => return Err(LabError::Parse { line, message: format!("{key}: {message}") }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> LabResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text)
}

fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}`"))
}

fn list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| num(s.trim())).collect()
}

fn ranges(v: &str) -> Result<Vec<(f64, f64)>, String> {
    v.split(',')
        .map(|pair| {
            let (lo, hi) = pair.trim().split_once(':').ok_or_else(|| format!("expected `low:high`, got `{pair}`"))?;
            Ok((num(lo.trim())?, num(hi.trim())?))
        })
        .collect()
}

fn init_mode(v: &str) -> Result<InitMode, String> {
    match v {
        "unloaded_drop" => Ok(InitMode::UnloadedDrop),
        "preloaded_lowered" => Ok(InitMode::PreloadedLowered),
        _ => Err(format!("unknown init mode `{v}`")),
    }
}

fn sim_field<'a>(p: &'a mut SimParams, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "mass" => &mut p.mass,
        "inertia" => &mut p.inertia,
        "gravity" => &mut p.gravity,
        "dt" => &mut p.dt,
        "spring_k" => &mut p.spring_k,
        "spring_d" => &mut p.spring_d,
        "hip_lag" => &mut p.hip_lag,
        "leg_len_min" => &mut p.leg_len_min,
        "leg_len_max" => &mut p.leg_len_max,
        "torque_max" => &mut p.torque_max,
        "axial_force_max" => &mut p.axial_force_max,
        "friction_mu" => &mut p.friction_mu,
        "fall_pitch" => &mut p.fall_pitch,
        "fall_height" => &mut p.fall_height,
        "motor_rate_max" => &mut p.motor_rate_max,
        "swing_angle_max" => &mut p.swing_angle_max,
        _ => return None,
    })
}

const SIM_KEYS: [&str; 16] = [
    "mass",
    "inertia",
    "gravity",
    "dt",
    "spring_k",
    "spring_d",
    "hip_lag",
    "leg_len_min",
    "leg_len_max",
    "torque_max",
    "axial_force_max",
    "friction_mu",
    "fall_pitch",
    "fall_height",
    "motor_rate_max",
    "swing_angle_max",
];

/// `Ok(false)` for an unknown key.
fn set(cfg: &mut ExperimentConfig, section: &str, key: &str, v: &str) -> Result<bool, String> {
    match section {
        "sim" => match sim_field(&mut cfg.sim, key) {
            Some(slot) => *slot = num(v)?,
            None => return Ok(false),
        },
        "gains" => match key.parse::<GainName>() {
            Ok(name) => cfg.gains.set(name, num(v)?),
            Err(_) => return Ok(false),
        },
        "policy" => {
            let p = &mut cfg.policy;
            match key {
                "kind" => p.kind = PolicyKind::parse(v).ok_or_else(|| format!("unknown policy kind `{v}`"))?,
                "hidden" => p.hidden = list(v)?,
                "log_std_init" => p.log_std_init = num(v)?,
                "ranges" => p.ranges = Some(ranges(v)?),
                _ => return Ok(false),
            }
        }
        "reward" => {
            let r = &mut cfg.reward;
            match key {
                "C1" => r.c1 = num(v)?,
                "C2" => r.c2 = num(v)?,
                "C3" => r.c3 = num(v)?,
                "v_tgt" => r.v_tgt = num(v)?,
                "T_max_steps" => r.t_max_steps = num(v)?,
                "torque_penalty_C4" => r.c4 = num(v)?,
                _ => return Ok(false),
            }
        }
        "ppo" => {
            let p = &mut cfg.ppo;
            match key {
                "clip_eps" => p.clip_eps = num(v)?,
                "gamma" => p.gamma = num(v)?,
                "lam" => p.lam = num(v)?,
                "learning_rate" => p.learning_rate = num(v)?,
                "epochs" => p.epochs = num(v)?,
                "minibatch" => p.minibatch = num(v)?,
                "value_coef" => p.value_coef = num(v)?,
                "max_grad_norm" => p.max_grad_norm = num(v)?,
                "samples_per_iter" => p.samples_per_iter = num(v)?,
                "episode_len_max_s" => p.episode_len_max_s = num(v)?,
                "optimizer" => p.optimizer = Optimizer::parse(v).ok_or_else(|| format!("unknown optimizer `{v}`"))?,
                _ => return Ok(false),
            }
        }
        "terrain" => {
            let t = &mut cfg.terrain;
            match key {
                "max_dev" => t.max_dev = num(v)?,
                "step_len_min" => t.step_len_min = num(v)?,
                "step_len_max" => t.step_len_max = num(v)?,
                "extent" => t.extent = num(v)?,
                _ => return Ok(false),
            }
        }
        "surrogate" => {
            let s = &mut cfg.surrogate;
            match key {
                "init_mode" => s.init_mode = init_mode(v)?,
                "mass_scale" => s.mass_scale = num(v)?,
                "inertia_scale" => s.inertia_scale = num(v)?,
                "hip_lag_scale" => s.hip_lag_scale = num(v)?,
                "spring_k_scale" => s.spring_k_scale = num(v)?,
                "sensor_noise_std" => {
                    let vals: Vec<f64> = list(v)?;
                    s.sensor_noise_std = vals
                        .try_into()
                        .map_err(|_| format!("expected {OBS_DIM} comma-separated values"))?;
                }
                _ => return Ok(false),
            }
        }
        "run" => {
            let r = &mut cfg.run;
            match key {
                "seed" => r.seed = num(v)?,
                "iterations" => r.iterations = num(v)?,
                "episodes" => r.episodes = num(v)?,
                "out_dir" => r.out_dir = v.to_string(),
                "terrain" => r.terrain = TerrainKind::parse(v).ok_or_else(|| format!("unknown terrain `{v}`"))?,
                "expert_samples" => r.expert_samples = num(v)?,
                "bc_epochs" => r.bc_epochs = num(v)?,
                "bc_learning_rate" => r.bc_learning_rate = num(v)?,
                "value_epochs" => r.value_epochs = num(v)?,
                "value_learning_rate" => r.value_learning_rate = num(v)?,
                _ => return Ok(false),
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn violation(section: &str, e: biped_core::Error) -> LabError {
    match e {
        biped_core::Error::InvalidParameter { field, reason } => {
            LabError::InvariantViolation { field: format!("{section}.{field}"), reason: reason.into() }
        }
        other => LabError::InvariantViolation { field: section.into(), reason: other.to_string() },
    }
}

fn bad(field: &str, reason: &str) -> LabError {
    LabError::InvariantViolation { field: field.into(), reason: reason.into() }
}

impl ExperimentConfig {
    pub fn validate(&self) -> LabResult<()> {
        self.sim.validate().map_err(|e| violation("sim", e))?;
        self.gains.validate_for(&self.sim).map_err(|e| violation("gains", e))?;
        self.reward.validate().map_err(|e| violation("reward", e))?;
        self.ppo.validate().map_err(|e| violation("ppo", e))?;
        self.terrain.validate().map_err(|e| violation("terrain", e))?;
        self.surrogate.validate().map_err(|e| violation("surrogate", e))?;
        let p = &self.policy;
        if p.hidden.iter().any(|&h| h == 0) {
            return Err(bad("policy.hidden", "layer sizes must be > 0"));
        }
        if !p.log_std_init.is_finite() {
            return Err(bad("policy.log_std_init", "must be finite"));
        }
        if let Some(r) = &p.ranges {
            if r.len() != 3 {
                return Err(bad("policy.ranges", "need exactly 3 low:high pairs"));
            }
            if r.iter().any(|&(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
                return Err(bad("policy.ranges", "need finite low < high"));
            }
        }
        let r = &self.run;
        if r.episodes == 0 {
            return Err(bad("run.episodes", "must be > 0"));
        }
        if r.expert_samples == 0 {
            return Err(bad("run.expert_samples", "must be > 0"));
        }
        for (field, lr) in [("run.bc_learning_rate", r.bc_learning_rate), ("run.value_learning_rate", r.value_learning_rate)] {
            if !(lr.is_finite() && lr > 0.0) {
                return Err(bad(field, "must be finite and > 0"));
            }
        }
        if self.max_steps() == 0 {
            return Err(bad("ppo.episode_len_max_s", "shorter than one timestep"));
        }
        Ok(())
    }

    /// Episode cap in simulator steps.
    pub fn max_steps(&self) -> u32 {
        let n = (self.ppo.episode_len_max_s / self.sim.dt).round();
        if n.is_finite() && n > 0.0 {
            n.min(f64::from(u32::MAX)) as u32
        } else {
            0
        }
    }

    pub fn env(&self, terrain: TerrainKind) -> Env {
        Env {
            params: self.sim,
            gains: self.gains,
            terrain: match terrain {
                TerrainKind::Flat => TerrainChoice::Flat(0.0),
                TerrainKind::Rough => TerrainChoice::Rough(self.terrain),
            },
            reward: self.reward,
            max_steps: self.max_steps(),
            ..Env::flat()
        }
    }

    pub fn surrogate(&self, terrain: TerrainKind) -> LabResult<Env> {
        Ok(surrogate_env(&self.env(terrain), &self.surrogate)?)
    }

    /// Fresh policy of the configured architecture.
    pub fn new_policy(&self, seed: u64) -> LabResult<GaussianMlpPolicy> {
        let p = &self.policy;
        let mut policy =
            GaussianMlpPolicy::new(p.kind, &p.hidden, p.log_std_init, &self.gains, &mut rng_from(derive(seed, stream::INIT, 0)))?;
        if let Some(r) = &p.ranges {
            policy.output_ranges = r.clone();
        }
        policy.validate()?;
        Ok(policy)
    }

    pub fn new_value(&self, seed: u64) -> LabResult<ValueNet> {
        Ok(ValueNet::new(&self.policy.hidden, &mut rng_from(derive(seed, stream::INIT, 1)))?)
    }

    pub fn bc_config(&self, seed: u64) -> BcConfig {
        BcConfig { learning_rate: self.run.bc_learning_rate, epochs: self.run.bc_epochs, seed, ..BcConfig::default() }
    }

    pub fn value_pretrain_config(&self, seed: u64) -> ValuePretrainConfig {
        ValuePretrainConfig {
            gamma: self.ppo.gamma,
            learning_rate: self.run.value_learning_rate,
            epochs: self.run.value_epochs,
            seed,
            ..ValuePretrainConfig::default()
        }
    }

    /// Every key, in the form [`parse_config`] reads back to an equal record.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, entries: Vec<(&str, String)>| {
            let _ = writeln!(out, "[{name}]");
            for (k, v) in entries {
                let _ = writeln!(out, "{k} = {v}");
            }
            out.push('\n');
        };
        let mut sim = self.sim;
        section("sim", SIM_KEYS.iter().map(|k| (*k, sim_field(&mut sim, k).unwrap().to_string())).collect());
        section("gains", GainName::ALL.iter().map(|n| (n.as_str(), self.gains.get(*n).to_string())).collect());
        let p = &self.policy;
        let mut policy = vec![
            ("kind", p.kind.as_str().to_string()),
            ("hidden", join(&p.hidden)),
            ("log_std_init", p.log_std_init.to_string()),
        ];
        if let Some(r) = &p.ranges {
            policy.push(("ranges", join(r.iter().map(|(lo, hi)| format!("{lo}:{hi}")))));
        }
        section("policy", policy);
        let r = &self.reward;
        section(
            "reward",
            vec![
                ("C1", r.c1.to_string()),
                ("C2", r.c2.to_string()),
                ("C3", r.c3.to_string()),
                ("v_tgt", r.v_tgt.to_string()),
                ("T_max_steps", r.t_max_steps.to_string()),
                ("torque_penalty_C4", r.c4.to_string()),
            ],
        );
        let c = &self.ppo;
        section(
            "ppo",
            vec![
                ("clip_eps", c.clip_eps.to_string()),
                ("gamma", c.gamma.to_string()),
                ("lam", c.lam.to_string()),
                ("learning_rate", c.learning_rate.to_string()),
                ("epochs", c.epochs.to_string()),
                ("minibatch", c.minibatch.to_string()),
                ("value_coef", c.value_coef.to_string()),
                ("max_grad_norm", c.max_grad_norm.to_string()),
                ("samples_per_iter", c.samples_per_iter.to_string()),
                ("episode_len_max_s", c.episode_len_max_s.to_string()),
                ("optimizer", c.optimizer.as_str().to_string()),
            ],
        );
        let t = &self.terrain;
        section(
            "terrain",
            vec![
                ("max_dev", t.max_dev.to_string()),
                ("step_len_min", t.step_len_min.to_string()),
                ("step_len_max", t.step_len_max.to_string()),
                ("extent", t.extent.to_string()),
            ],
        );
        let s = &self.surrogate;
        section(
            "surrogate",
            vec![
                ("init_mode", s.init_mode.as_str().to_string()),
                ("mass_scale", s.mass_scale.to_string()),
                ("inertia_scale", s.inertia_scale.to_string()),
                ("hip_lag_scale", s.hip_lag_scale.to_string()),
                ("spring_k_scale", s.spring_k_scale.to_string()),
                ("sensor_noise_std", join(s.sensor_noise_std)),
            ],
        );
        let r = &self.run;
        section(
            "run",
            vec![
                ("seed", r.seed.to_string()),
                ("iterations", r.iterations.to_string()),
                ("episodes", r.episodes.to_string()),
                ("out_dir", r.out_dir.clone()),
                ("terrain", r.terrain.as_str().to_string()),
                ("expert_samples", r.expert_samples.to_string()),
                ("bc_epochs", r.bc_epochs.to_string()),
                ("bc_learning_rate", r.bc_learning_rate.to_string()),
                ("value_epochs", r.value_epochs.to_string()),
                ("value_learning_rate", r.value_learning_rate.to_string()),
            ],
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
        assert_eq!(parse_config("# nothing\n\n").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn reward_constants() {
        let cfg = parse_config("[reward]\nC1 = 1.0\nC2 = 0.3\nC3 = 0.01").unwrap();
        assert_eq!((cfg.reward.c1, cfg.reward.c2, cfg.reward.c3), (1.0, 0.3, 0.01));
    }

    #[test]
    fn negative_dt() {
        match parse_config("[sim]\ndt = -1") {
            Err(LabError::InvariantViolation { field, .. }) => assert_eq!(field, "sim.dt"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_config("[sim]\n\nmass = heavy") {
            Err(LabError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_config("[gains]\nK_pt = 1\nkp = 3") {
            Err(LabError::UnknownKey { line, key, .. }) => assert_eq!((line, key.as_str()), (3, "kp")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("mass = 3"), Err(LabError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("[nope]"), Err(LabError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("[sim]\nmass = 60\nmass = 61"), Err(LabError::Parse { line: 3, .. })));
    }

    #[test]
    fn comments_and_lists() {
        let cfg = parse_config(
            "[policy] # arch\nkind = heuristic_nn\nhidden = 32, 16\nranges = -1:1, -2:2, -3:3\n[surrogate]\nsensor_noise_std = 0,0,0.01,0,0,0",
        )
        .unwrap();
        assert_eq!(cfg.policy.kind, PolicyKind::HeuristicNn);
        assert_eq!(cfg.policy.hidden, vec![32, 16]);
        assert_eq!(cfg.policy.ranges, Some(vec![(-1.0, 1.0), (-2.0, 2.0), (-3.0, 3.0)]));
        assert_eq!(cfg.surrogate.sensor_noise_std[2], 0.01);
    }

    #[test]
    fn default_round_trip() {
        let cfg = ExperimentConfig::default();
        assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn episode_cap() {
        assert_eq!(ExperimentConfig::default().max_steps(), 10_000);
        assert_eq!(ExperimentConfig::default().env(TerrainKind::Flat).max_steps, 10_000);
    }
}
