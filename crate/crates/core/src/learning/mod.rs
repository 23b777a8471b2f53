//! Rewards, episode running, rollout collection, advantage estimation, PPO,
//! and the supervised warm starts (behaviour cloning and value pretraining).

mod bc;
mod env;
mod gae;
mod ppo;
mod reward;
mod rollout;
mod train;

pub use bc::{
    action_mse, bc_gradient, bc_loss, behavior_clone, collect_expert_data, td_gradient, td_loss, value_pretrain,
    BcConfig, ExpertData, ValuePretrainConfig,
};
pub use env::{run_episode, Controller, Env, EpisodeSummary, StepRecord, TerrainChoice};
pub use gae::{compute_gae, gae_raw, normalize};
pub use ppo::{ppo_gradients, ppo_update, surrogate, Optimizer, PpoConfig, PpoOptimizer, PpoStats};
pub use reward::{reward, reward_torque_penalty, RewardConfig, C4_VARIANT, TORQUE_SCALE};
pub use rollout::{collect_rollouts, episode_seed, RolloutBatch, Transition};
pub use train::{train_loop, CurvePoint, TrainOutput};
