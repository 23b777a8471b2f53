use super::dynamics::axial_spring_force;
use super::params::SimParams;
use super::state::{RobotState, Stance};
use super::terrain::Terrain;

/// Consecutive unloaded steps that end a stance phase.
pub const LIFTOFF_UNLOAD_STEPS: u32 = 5;

/// Phase-timing thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsmTiming {
    /// Liftoff is not considered before this much stance time, s.
    pub min_stance_time: f64,
    /// Touchdown is ignored before this much swing time (half the swing
    /// duration), s.
    pub min_swing_time: f64,
}

impl FsmTiming {
    pub fn from_swing_duration(swing_duration: f64, min_stance_time: f64) -> Self {
        Self { min_stance_time, min_swing_time: 0.5 * swing_duration }
    }
}

/// Stance/swing/flight transitions.
///
/// Touchdown of the swing foot immediately makes it the stance leg and lifts
/// the old stance leg (no double support).
pub fn fsm_update(state: &RobotState, terrain: &Terrain, params: &SimParams, timing: &FsmTiming) -> RobotState {
    let mut s = state.clone();
    let swing = s.swing_side();

    let foot = *s.leg(swing);
    let ground = terrain.height_at(foot.foot_x);
    if foot.foot_z <= ground && s.phase_time() >= timing.min_swing_time {
        let (hx, hz, hdx, hdz) = (s.x, s.z, s.dx, s.dz);
        if let Some(old) = s.stance_leg.side() {
            let leg = s.leg_mut(old);
            leg.in_contact = false;
            leg.motor_length = leg.length;
        }
        let old_foot_z = s.leg(s.last_stance).foot_z;
        let leg = s.leg_mut(swing);
        leg.in_contact = true;
        leg.foot_z = ground;
        leg.attach_to_hip(hx, hz, hdx, hdz);
        leg.length = leg.length.clamp(params.leg_len_min, params.leg_len_max);
        leg.place_foot(hx, hz);
        leg.pinned_x = leg.foot_x;
        leg.motor_length = leg.length;
        leg.hip_torque_actual = 0.0;
        s.stance_leg = Stance::from_side(swing);
        s.last_stance = swing;
        s.phase_start_t = s.t;
        s.swing_start_z = old_foot_z;
        s.unload_count = 0;
        s.steps_taken += 1;
        return s;
    }

    if let Some(side) = s.stance_leg.side() {
        if s.phase_time() >= timing.min_stance_time {
            let leg = s.leg(side);
            let axial = axial_spring_force(leg.motor_length, leg.length, leg.length_rate, params);
            if axial <= 0.0 {
                s.unload_count += 1;
            } else {
                s.unload_count = 0;
            }
            if s.unload_count >= LIFTOFF_UNLOAD_STEPS {
                s.leg_mut(side).in_contact = false;
                s.stance_leg = Stance::Flight;
                s.unload_count = 0;
            }
        }
    }
    s
}
