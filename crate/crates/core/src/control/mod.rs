//! Feedback-based reactive walking controller.
//!
//! Stance regulates torso pitch and CoM height through a desired ground
//! reaction force; swing places the foot with a Raibert-style velocity law and
//! a quintic trajectory that ends ground-speed matched. Forces become motor
//! set-points through inverse dynamics, foot targets through inverse
//! kinematics.

mod expert;
mod feedback;
mod gains;
mod kinematics;
mod pipeline;
mod swing;

pub use expert::expert_action;
pub use feedback::{foot_placement, stance_grf, Action};
pub(crate) use feedback::pitch_height_grf;
pub use gains::{GainName, GainSet};
pub use kinematics::{inverse_dynamics, inverse_kinematics, IkSolution, StanceCommand};
pub use pipeline::{motor_command, PipelineOutput};
pub use swing::{
    plan_swing, plan_swing_segment, swing_setpoint, Apex, FootPoint, Quintic, SwingTrajectory,
    TOUCHDOWN_SPEED,
};
