use rand::Rng as _;
use rand_distr::StandardNormal;

use super::reward::{reward, reward_torque_penalty, RewardConfig};
use crate::control::{expert_action, motor_command, Action, GainSet, PipelineOutput};
use crate::error::{invalid, Result};
use crate::nets::{Decision, GaussianMlpPolicy, Observation, PolicyMode, OBS_DIM};
use crate::rng::{derive, rng_from, stream};
use crate::sim::{
    check_fall, fsm_update, generate_terrain, initial_state, step, FsmTiming, InitMode, RobotState, SimParams,
    Terrain, TerrainSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub enum TerrainChoice {
    /// Level ground at the given height.
    Flat(f64),
    /// A fresh random step profile per episode.
    Rough(TerrainSpec),
    /// The same profile every episode.
    Fixed(Terrain),
}

/// Everything needed to run an episode apart from the controller.
#[derive(Debug, Clone, PartialEq)]
pub struct Env {
    pub params: SimParams,
    /// Gains for the expert and for the swing pipeline of force-level policies.
    pub gains: GainSet,
    pub terrain: TerrainChoice,
    pub init_mode: InitMode,
    pub reward: RewardConfig,
    pub max_steps: u32,
    pub min_stance_time: f64,
    /// Per-channel observation noise std in physical units.
    pub sensor_noise_std: [f64; OBS_DIM],
}

impl Env {
    pub fn flat() -> Self {
        Self {
            params: SimParams::default(),
            gains: GainSet::default(),
            terrain: TerrainChoice::Flat(0.0),
            init_mode: InitMode::UnloadedDrop,
            reward: RewardConfig::default(),
            max_steps: 10_000,
            min_stance_time: 0.1,
            sensor_noise_std: [0.0; OBS_DIM],
        }
    }

    pub fn rough() -> Self {
        Self { terrain: TerrainChoice::Rough(TerrainSpec::default()), ..Self::flat() }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.gains.validate_for(&self.params)?;
        self.reward.validate()?;
        if let TerrainChoice::Rough(spec) = &self.terrain {
            spec.validate()?;
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "must be > 0"));
        }
        if !(self.min_stance_time >= 0.0) {
            return Err(invalid("min_stance_time", "must be >= 0"));
        }
        if self.sensor_noise_std.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(invalid("sensor_noise_std", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn terrain_for(&self, episode_seed: u64) -> Result<Terrain> {
        match &self.terrain {
            TerrainChoice::Flat(h) => Ok(Terrain::flat(*h)),
            TerrainChoice::Rough(spec) => generate_terrain(derive(episode_seed, stream::TERRAIN, 0), spec),
            TerrainChoice::Fixed(t) => Ok(t.clone()),
        }
    }

    /// Start state on `terrain`, CoM `START_DROP` above `z_des`.
    pub fn start_state(&self, terrain: &Terrain) -> RobotState {
        let mut s = initial_state(&self.params, self.gains.z_des, self.init_mode);
        let ground = terrain.height_at(0.0);
        if ground != 0.0 {
            s.z += ground;
            for leg in [&mut s.left, &mut s.right] {
                leg.foot_z += ground;
            }
            s.swing_start_z = ground;
        }
        s
    }
}

/// Who picks the actions.
#[derive(Debug, Clone, Copy)]
pub enum Controller<'a> {
    Expert,
    Policy(&'a GaussianMlpPolicy, PolicyMode),
}

/// What the observer sees after each simulated step.
#[derive(Debug)]
pub struct StepRecord<'a> {
    pub index: u32,
    /// Observation the action was chosen from.
    pub obs: &'a Observation,
    pub decision: Option<&'a Decision>,
    pub action: &'a Action,
    pub command: &'a PipelineOutput,
    /// State after the step.
    pub state: &'a RobotState,
    pub reward: f64,
    pub fell: bool,
    pub done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub total_reward: f64,
    pub steps: u32,
    pub fell: bool,
    pub distance: f64,
}

/// Runs one episode. `episode_seed` fixes terrain, exploration noise and
/// sensor noise.
pub fn run_episode(
    env: &Env,
    controller: Controller<'_>,
    episode_seed: u64,
    observer: &mut dyn FnMut(&StepRecord<'_>),
) -> Result<EpisodeSummary> {
    let terrain = env.terrain_for(episode_seed)?;
    let mut state = env.start_state(&terrain);
    let mut action_rng = rng_from(derive(episode_seed, stream::ACTIONS, 0));
    let mut sensor_rng = rng_from(derive(episode_seed, stream::SENSOR, 0));
    let noisy = env.sensor_noise_std.iter().any(|&s| s > 0.0);
    let gains = match controller {
        Controller::Policy(p, _) => *p.pipeline_gains(&env.gains),
        Controller::Expert => env.gains,
    };
    let timing = FsmTiming::from_swing_duration(gains.swing_time, env.min_stance_time);
    let x0 = state.x;
    let mut total = 0.0;
    for index in 0..env.max_steps {
        let mut obs = Observation::from_state(&state);
        if noisy {
            let mut n = [0.0; OBS_DIM];
            for (v, s) in n.iter_mut().zip(env.sensor_noise_std) {
                let e: f64 = sensor_rng.sample(StandardNormal);
                *v = s * e;
            }
            obs = obs.with_noise(&n);
        }
        let decision = match controller {
            Controller::Expert => None,
            Controller::Policy(p, mode) => Some(p.act(&obs, &state, mode, &mut action_rng)?),
        };
        let action = match &decision {
            Some(d) => d.action,
            None => expert_action(&state, &gains),
        };
        let command = motor_command(&state, &action, &gains, &env.params);
        let next = step(&state, &command.cmd, &env.params)?;
        state = fsm_update(&next, &terrain, &env.params, &timing);
        let fell = check_fall(&state, &env.params);
        let mut r = reward(state.dx, state.pitch_rate, fell, &env.reward);
        if env.reward.c4 != 0.0 {
            let (axial, tau) = command.stance.map_or((0.0, 0.0), |c| (c.axial_force, c.hip_torque));
            r = reward_torque_penalty(r, axial, tau, &env.reward);
        }
        total += r;
        let done = fell || index + 1 == env.max_steps;
        observer(&StepRecord {
            index,
            obs: &obs,
            decision: decision.as_ref(),
            action: &action,
            command: &command,
            state: &state,
            reward: r,
            fell,
            done,
        });
        if fell {
            return Ok(EpisodeSummary { total_reward: total, steps: index + 1, fell, distance: state.x - x0 });
        }
    }
    Ok(EpisodeSummary { total_reward: total, steps: env.max_steps, fell: false, distance: state.x - x0 })
}
