//! Fixed-step planar mechanics.
//!
//! All mass sits in the torso; the hip is at the CoM. Each leg is massless with
//! two actuated coordinates: the angle from the downward vertical (positive
//! puts the foot forward) and the hip-to-foot length. The stance leg carries a
//! series spring between the motor-side length and the actual length.
//!
//! Pitch is measured counter-clockwise in the x-forward / z-up plane, so a
//! positive pitch leans the torso backward and a forward ground reaction force
//! under the CoM raises it.

mod dynamics;
mod fsm;
mod params;
mod start;
mod state;
mod terrain;

pub use dynamics::{axial_spring_force, check_fall, saturate_grf, stance_wrench, step, MotorCommand};
pub use fsm::{fsm_update, FsmTiming, LIFTOFF_UNLOAD_STEPS};
pub use params::SimParams;
pub use start::{initial_state, InitMode, START_DROP};
pub use state::{LegState, RobotState, Side, Stance};
pub use terrain::{generate_terrain, terrain_height, Terrain, TerrainSpec};
