//! Scoring a path and rewarding an improvement.
//!
//! A path of optical time `T` earns the score `R_s = N * exp(-T)`: strictly
//! decreasing in `T`, so the least-time path has the highest score. The
//! per-round reward is the difference between the current score and the best
//! score seen so far in the episode, which is positive exactly when the
//! round sets a new episode best.

use crate::error::{Error, Result};

/// Score `R_s = scale * exp(-time)` computed literally.
///
/// With times in the hundreds `exp(-time)` underflows f64 unless `scale` is
/// comparably huge; [`RewardScale`] keeps the product representable by
/// working with `log(scale)` instead. This form exists for small inputs and
/// for documenting the definition.
pub fn r_score(time: f64, scale: f64) -> f64 {
    scale * libm::exp(-time)
}

/// Reward for a round: current score minus the best score seen so far this
/// episode.
pub fn reward(current_score: f64, best_score: f64) -> f64 {
    current_score - best_score
}

/// Score factor `N` held as `log N`, so that `N * exp(-T)` is evaluated as
/// `exp(log N - T)` and survives `N = e^300`-sized factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardScale {
    log_scale: f64,
}

impl RewardScale {
    /// The normalized choice `N = exp(T_ref)`, which makes the score of a
    /// path with time `T_ref` exactly 1. Using the time of the initial path
    /// keeps early rewards O(1) for any geometry.
    pub fn normalized(reference_time: f64) -> Self {
        RewardScale {
            log_scale: reference_time,
        }
    }

    /// An explicit factor `N > 0`.
    pub fn explicit(scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::NonPositiveScale { value: scale });
        }
        Ok(RewardScale {
            log_scale: libm::log(scale),
        })
    }

    pub fn log_scale(self) -> f64 {
        self.log_scale
    }

    /// `N * exp(-time)`, evaluated as `exp(log N - time)`.
    pub fn score(self, time: f64) -> f64 {
        libm::exp(self.log_scale - time)
    }
}
