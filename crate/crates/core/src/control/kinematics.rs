use libm::{atan2, cos, sin, sqrt};

use crate::sim::{saturate_grf, SimParams};

/// Leg coordinates for a hip-relative foot position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkSolution {
    pub angle: f64,
    pub length: f64,
    /// The requested length was outside the leg range and got clamped.
    pub out_of_reach: bool,
}

/// Polar conversion of a hip-relative foot position, with the length clamped
/// to the leg range.
pub fn inverse_kinematics(foot_rel_hip: (f64, f64), params: &SimParams) -> IkSolution {
    let (x, z) = foot_rel_hip;
    let raw = sqrt(x * x + z * z);
    let length = raw.clamp(params.leg_len_min, params.leg_len_max);
    IkSolution { angle: atan2(x, -z), length, out_of_reach: length != raw }
}

/// Stance actuator set-points realizing a desired ground reaction force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StanceCommand {
    pub axial_force: f64,
    pub hip_torque: f64,
    pub motor_length: f64,
}

/// Maps a desired GRF onto the stance leg: the force is first saturated to the
/// friction cone (`fz ≥ 0`, `|fx| ≤ mu·fz`), then split into the axial spring
/// force and the hip torque; the motor-side length inverts the spring law.
pub fn inverse_dynamics(
    fx: f64,
    fz: f64,
    angle: f64,
    length: f64,
    length_rate: f64,
    params: &SimParams,
) -> StanceCommand {
    let (fx, fz) = saturate_grf(fx, fz, params.friction_mu);
    let (s, c) = (sin(angle), cos(angle));
    let axial_force = fz * c - fx * s;
    let hip_torque = (length * (fx * c + fz * s)).clamp(-params.torque_max, params.torque_max);
    let motor_length = length + (axial_force + params.spring_d * length_rate) / params.spring_k;
    StanceCommand { axial_force, hip_torque, motor_length }
}
