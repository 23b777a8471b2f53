use super::params::SimParams;
use super::state::{LegState, RobotState, Side, Stance};

/// How the stance spring is loaded when an episode begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitMode {
    /// Spring deflection zero: the controller has to build leg force from
    /// nothing (the training start).
    UnloadedDrop,
    /// Spring pre-deflected by `mass·g/spring_k`, as when a robot held in the
    /// air is lowered onto a position-controlled leg.
    PreloadedLowered,
}

impl InitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InitMode::UnloadedDrop => "unloaded_drop",
            InitMode::PreloadedLowered => "preloaded_lowered",
        }
    }
}

/// CoM release height above the leg-supported height.
pub const START_DROP: f64 = 0.01;
const START_SWING_ANGLE: f64 = -0.15;
const START_SWING_LENGTH: f64 = 0.8;

/// Standard start: left leg vertical under the CoM with its foot at the origin,
/// CoM at `support_height + START_DROP`, everything at rest, right leg tucked
/// behind and starting its first swing.
pub fn initial_state(params: &SimParams, support_height: f64, mode: InitMode) -> RobotState {
    let z = support_height + START_DROP;
    let mut stance = LegState::from_geometry(0.0, z, 0.0, z);
    stance.foot_x = 0.0;
    stance.foot_z = 0.0;
    stance.in_contact = true;
    stance.pinned_x = 0.0;
    if mode == InitMode::PreloadedLowered {
        stance.motor_length = stance.length + params.weight() / params.spring_k;
    }
    let swing = LegState::from_geometry(0.0, z, START_SWING_ANGLE, START_SWING_LENGTH);
    RobotState {
        x: 0.0,
        z,
        dx: 0.0,
        dz: 0.0,
        pitch: 0.0,
        pitch_rate: 0.0,
        left: stance,
        right: swing,
        stance_leg: Stance::Left,
        last_stance: Side::Left,
        phase_start_t: 0.0,
        swing_start_z: 0.0,
        unload_count: 0,
        t: 0.0,
        steps_taken: 0,
        grf: (0.0, 0.0),
    }
}
