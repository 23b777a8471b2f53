//! Planar biped locomotion lab.
//!
//! The crate is `no_std` (with `alloc`) and holds everything that is pure
//! computation:
//!
//! - [`sim`]: a torso with two massless series-elastic telescoping legs walking
//!   over piecewise-constant terrain, stepped at a fixed 1 ms timestep.
//! - [`control`]: the feedback-based reactive walking controller (stance GRF
//!   regulation, Raibert-style foot placement, swing splines, inverse
//!   kinematics and inverse dynamics).
//! - [`nets`]: a hand-written MLP with reverse-mode gradients, the Gaussian
//!   policy and the two policy architectures (pure network and network inside
//!   the heuristic controller).
//! - [`learning`]: reward, rollouts, GAE, clipped PPO, behavior cloning and
//!   value pretraining.
//! - [`transfer`]: the perturbed "hardware surrogate" and the transfer study.
//!
//! File formats, configuration and the command line live in the `biped-lab`
//! companion crate.
#![no_std]

extern crate alloc;

pub mod control;
pub mod error;
pub mod learning;
pub mod nets;
pub mod rng;
pub mod sim;
pub mod transfer;

pub use error::{Error, Result};
