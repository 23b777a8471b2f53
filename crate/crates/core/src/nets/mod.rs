//! Hand-written networks: a tanh MLP with reverse-mode gradients, the
//! state-independent-std Gaussian policy wrapping either policy
//! architecture, and the state-value network.

mod mlp;
mod observation;
mod optim;
mod policy;
mod value;

pub use mlp::{mlp_forward, mlp_gradient, MlpParams, MlpTrace};
pub use observation::{Observation, OBS_DIM, OBS_SCALE};
pub use optim::{add_scaled, global_norm, scale_all, zeros_like, Adam, Params};
pub use policy::{
    heuristic_nn_action, policy_logprob, policy_sample, pure_nn_action, Decision, GaussianMlpPolicy,
    PolicyKind, PolicyMode, ACTION_DIM, HEURISTIC_RANGES, PURE_RANGES,
};
pub use value::{ValueNet, VALUE_SCALE};
