use libm::{cos, sin};

use super::params::SimParams;
use super::state::{RobotState, Side, Stance};
use crate::error::{Error, Result};

/// Actuator set-points for one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorCommand {
    pub stance_motor_length: f64,
    pub stance_hip_torque: f64,
    pub swing_angle_target: f64,
    pub swing_length_target: f64,
    pub swing_angle_rate_target: f64,
    pub swing_length_rate_target: f64,
}

/// Series-spring force along the leg; positive compresses the leg and pushes
/// the torso away from the foot.
pub fn axial_spring_force(motor_length: f64, length: f64, length_rate: f64, params: &SimParams) -> f64 {
    params.spring_k * (motor_length - length) - params.spring_d * length_rate
}

/// Force and pitch moment a stance leg with the given axial force and hip
/// torque exerts on the torso, before friction / unilateral saturation.
///
/// The force is `axial·(−û) + (τ/length)·û⊥` with `û` the unit hip→foot vector
/// and `û⊥ = (cos angle, sin angle)`; the moment is that of the ground
/// reaction about the hip, which equals `τ`.
pub fn stance_wrench(axial: f64, hip_torque: f64, angle: f64, length: f64) -> (f64, f64) {
    let (s, c) = (sin(angle), cos(angle));
    let tangential = hip_torque / length;
    (-axial * s + tangential * c, axial * c + tangential * s)
}

/// Clamps `fz ≥ 0` and `|fx| ≤ mu·fz`.
pub fn saturate_grf(fx: f64, fz: f64, mu: f64) -> (f64, f64) {
    let fz = fz.max(0.0);
    let lim = mu * fz;
    (fx.clamp(-lim, lim), fz)
}

fn first_order(current: f64, target: f64, dt: f64, lag: f64) -> f64 {
    let alpha = (dt / lag).min(1.0);
    current + (target - current) * alpha
}

/// One fixed step of length `params.dt`.
///
/// Velocities are advanced with the forces at the start of the step and
/// positions with the mean of the old and new velocities, which is exact for
/// piecewise-constant forces (ballistic flight, static equilibrium).
pub fn step(state: &RobotState, cmd: &MotorCommand, params: &SimParams) -> Result<RobotState> {
    let mut s = state.clone();
    let dt = params.dt;

    let (mut fx, mut fz, mut moment) = (0.0, 0.0, 0.0);
    if let Some(side) = s.stance_leg.side() {
        let (hip_x, hip_z) = (s.x, s.z);
        let leg = s.leg_mut(side);
        let slew = params.motor_rate_max * dt;
        leg.motor_length += (cmd.stance_motor_length - leg.motor_length).clamp(-slew, slew);
        leg.hip_torque_actual = first_order(leg.hip_torque_actual, cmd.stance_hip_torque, dt, params.hip_lag)
            .clamp(-params.torque_max, params.torque_max);

        let axial = axial_spring_force(leg.motor_length, leg.length, leg.length_rate, params)
            .clamp(-params.axial_force_max, params.axial_force_max);
        let (raw_x, raw_z) = stance_wrench(axial, leg.hip_torque_actual, leg.angle, leg.length);
        (fx, fz) = saturate_grf(raw_x, raw_z, params.friction_mu);
        let (ux, uz) = (leg.foot_x - hip_x, leg.foot_z - hip_z);
        moment = ux * fz - uz * fx;
    }
    s.grf = (fx, fz);

    let (dx0, dz0, w0) = (s.dx, s.dz, s.pitch_rate);
    s.dx += fx / params.mass * dt;
    s.dz += (fz / params.mass - params.gravity) * dt;
    s.pitch_rate += moment / params.inertia * dt;
    s.x += 0.5 * (dx0 + s.dx) * dt;
    s.z += 0.5 * (dz0 + s.dz) * dt;
    s.pitch += 0.5 * (w0 + s.pitch_rate) * dt;
    s.t += dt;

    if let Some(side) = s.stance_leg.side() {
        update_stance_leg(&mut s, side, params);
    }
    let swing = s.swing_side();
    for side in [Side::Left, Side::Right] {
        if s.stance_leg.side() == Some(side) {
            continue;
        }
        let (hx, hz) = (s.x, s.z);
        let leg = s.leg_mut(side);
        if side == swing {
            // targets are for the end of the step; the leg follows the rate
            // feed-forward and closes the remaining error with time constant hip_lag
            let gain = (dt / params.hip_lag).min(1.0);
            let a_pred = leg.angle + cmd.swing_angle_rate_target * dt;
            let l_pred = leg.length + cmd.swing_length_rate_target * dt;
            let angle = (a_pred + gain * (cmd.swing_angle_target - a_pred))
                .clamp(-params.swing_angle_max, params.swing_angle_max);
            let length = (l_pred + gain * (cmd.swing_length_target - l_pred))
                .clamp(params.leg_len_min, params.leg_len_max);
            leg.angle_rate = (angle - leg.angle) / dt;
            leg.length_rate = (length - leg.length) / dt;
            leg.angle = angle;
            leg.length = length;
        } else {
            leg.angle_rate = 0.0;
            leg.length_rate = 0.0;
        }
        leg.motor_length = leg.length;
        leg.hip_torque_actual = first_order(leg.hip_torque_actual, 0.0, dt, params.hip_lag);
        leg.in_contact = false;
        leg.place_foot(hx, hz);
    }

    if !s.is_finite() {
        return Err(Error::NonFinite("robot state"));
    }
    Ok(s)
}

/// Re-derives the pinned leg from the new hip pose and enforces the length
/// stops: past the upper stop the foot releases, at the lower stop the hip is
/// held at minimum length.
fn update_stance_leg(s: &mut RobotState, side: Side, params: &SimParams) {
    let (x, z, dx, dz) = (s.x, s.z, s.dx, s.dz);
    s.leg_mut(side).attach_to_hip(x, z, dx, dz);
    let leg = *s.leg(side);
    if leg.length > params.leg_len_max {
        let leg = s.leg_mut(side);
        leg.in_contact = false;
        leg.length = params.leg_len_max;
        leg.length_rate = 0.0;
        leg.motor_length = leg.length;
        leg.place_foot(x, z);
        s.stance_leg = Stance::Flight;
        s.last_stance = side;
        s.unload_count = 0;
    } else if leg.length < params.leg_len_min {
        let (ux, uz) = ((leg.foot_x - x) / leg.length, (leg.foot_z - z) / leg.length);
        s.x = leg.foot_x - params.leg_len_min * ux;
        s.z = leg.foot_z - params.leg_len_min * uz;
        let toward = s.dx * ux + s.dz * uz;
        if toward > 0.0 {
            s.dx -= toward * ux;
            s.dz -= toward * uz;
        }
        let (x, z, dx, dz) = (s.x, s.z, s.dx, s.dz);
        let leg = s.leg_mut(side);
        leg.attach_to_hip(x, z, dx, dz);
        leg.length = params.leg_len_min;
    }
}

/// True once the torso pitches past `fall_pitch` or the CoM drops below
/// `fall_height`.
pub fn check_fall(state: &RobotState, params: &SimParams) -> bool {
    state.pitch.abs() > params.fall_pitch || state.z < params.fall_height
}
