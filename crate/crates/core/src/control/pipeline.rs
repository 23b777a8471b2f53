use super::feedback::Action;
use super::gains::GainSet;
use super::kinematics::{inverse_dynamics, inverse_kinematics, StanceCommand};
use super::swing::{plan_swing_segment, swing_setpoint, Apex, FootPoint, TOUCHDOWN_SPEED};
use libm::{cos, sin};

use crate::sim::{MotorCommand, RobotState, SimParams};

/// Motor set-points plus diagnostics of one control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOutput {
    pub cmd: MotorCommand,
    /// Present while a leg is in stance.
    pub stance: Option<StanceCommand>,
    /// The swing target needed clamping to the leg range.
    pub out_of_reach: bool,
}

/// Turns an [`Action`] into motor set-points: inverse dynamics on the stance
/// leg and a swing set-point through inverse kinematics.
///
/// The controller is blind: the touchdown height is assumed to equal the
/// support foot height.
pub fn motor_command(state: &RobotState, action: &Action, gains: &GainSet, params: &SimParams) -> PipelineOutput {
    let mut cmd = MotorCommand::default();
    let stance = state.stance_leg.side().map(|side| {
        let leg = state.leg(side);
        let sc = inverse_dynamics(action.fx, action.fz, leg.angle, leg.length, leg.length_rate, params);
        cmd.stance_motor_length = sc.motor_length;
        cmd.stance_hip_torque = sc.hip_torque;
        sc
    });

    let target = swing_target(state, action.x_p, gains, params.dt);
    let ik = inverse_kinematics(target.pos, params);
    let (s, c) = (sin(ik.angle), cos(ik.angle));
    cmd.swing_angle_target = ik.angle;
    cmd.swing_length_target = ik.length;
    cmd.swing_angle_rate_target = (target.vel.0 * c + target.vel.1 * s) / ik.length;
    cmd.swing_length_rate_target = target.vel.0 * s - target.vel.1 * c;

    PipelineOutput { cmd, stance, out_of_reach: ik.out_of_reach }
}

/// Hip-relative foot set-point for the end of this control step.
///
/// Horizontally the spline is re-planned every step from the current foot
/// state toward the latest `x_p` over the remaining swing time. Vertically the
/// foot follows a fixed world-frame profile from its lift-off height to the
/// support foot height with an apex `clearance` above the higher of the two.
/// Past the planned swing time the foot keeps descending at
/// [`TOUCHDOWN_SPEED`], ground-speed matched.
fn swing_target(state: &RobotState, x_p: f64, gains: &GainSet, dt: f64) -> FootPoint {
    let leg = state.leg(state.swing_side());
    let now = FootPoint { pos: leg.foot_rel(), vel: leg.foot_rel_vel() };
    let elapsed = state.phase_time();
    let remaining = gains.swing_time - elapsed;
    let ground = state.support_foot().1;
    // hip at the end of the step
    let (hip_z, hip_dz) = (state.z + state.dz * dt, state.dz);

    if remaining <= 2.0 * dt {
        let vel = (-state.dx, -TOUCHDOWN_SPEED - hip_dz);
        return FootPoint { pos: (now.pos.0 + vel.0 * dt, now.pos.1 + vel.1 * dt), vel };
    }

    let horizontal = plan_swing_segment(now, x_p, -state.dx, now.pos.1, 0.0, remaining, None);
    let lift = FootPoint { pos: (0.0, state.swing_start_z), vel: (0.0, 0.0) };
    let apex = Apex { phase: 0.5, height: state.swing_start_z.max(ground) + gains.clearance };
    let vertical = plan_swing_segment(lift, 0.0, 0.0, ground, -TOUCHDOWN_SPEED, gains.swing_time, Some(apex));
    match (horizontal, vertical) {
        (Ok(h), Ok(v)) => {
            let hs = swing_setpoint(&h, dt);
            let vs = swing_setpoint(&v, elapsed + dt);
            FootPoint { pos: (hs.pos.0, vs.pos.1 - hip_z), vel: (hs.vel.0, vs.vel.1 - hip_dz) }
        }
        _ => FootPoint { pos: now.pos, vel: (0.0, 0.0) },
    }
}
