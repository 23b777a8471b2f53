use super::feedback::{foot_placement, stance_grf, Action};
use super::gains::GainSet;
use crate::sim::RobotState;

/// The reactive expert: stance GRF from pitch and height (measured above the
/// support foot), placement target from the current forward velocity.
pub fn expert_action(state: &RobotState, gains: &GainSet) -> Action {
    let (fx, fz) = stance_grf(state.pitch, state.pitch_rate, state.height(), state.dz, gains);
    Action { fx, fz, x_p: foot_placement(state.dx, gains) }
}
