//! Q-learning a least-time light path through layered media.
//!
//! Light crossing a stack of refractive slabs follows the path of least
//! optical time (Fermat's principle). This crate frames finding that path
//! as a reinforcement-learning problem: states are the integer heights at
//! which the path crosses the slab interfaces, actions nudge one crossing
//! up or down, and the reward is the improvement in a score that decays
//! exponentially with optical time. A tabular Q-learning agent trained on
//! nothing but that reward recovers the refraction angles dictated by
//! Snell's law.
//!
//! The crate has four parts:
//!
//! * [`medium`]: slab geometry, path states, single-step actions, and
//!   optical time.
//! * [`score`]: the exponential time score and improvement reward.
//! * [`agent`]: the Q-table, epsilon-greedy action selection, the episode
//!   loop, and greedy policy extraction.
//! * [`oracle`]: exhaustive and continuous (Snell-exact) reference
//!   solvers, used to verify what the agent learns.
//!
//! `no_std` by default (with `alloc`); the `std` feature only widens
//! downstream ergonomics and is on by default.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod agent;
pub mod error;
pub mod medium;
pub mod oracle;
pub mod rng;
pub mod score;

pub use agent::{greedy_state, run_episode, select_action, AgentConfig, QTable, RoundRecord};
pub use error::{Endpoint, Error, Result};
pub use medium::{Direction, InterfaceState, LayeredMedium, MoveAction};
pub use oracle::{
    brute_force_optimum, brute_force_optimum_capped, fermat_continuous, snell_residual,
    ContinuousOptimum, DiscreteOptimum, DEFAULT_FERMAT_TOL, EXHAUSTIVE_SCAN_CAP,
};
pub use rng::{seeded_rng, TrainRng};
pub use score::{r_score, reward, RewardScale};
