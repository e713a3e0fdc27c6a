//! Tabular Q-learning over interface states.
//!
//! The agent walks the grid of crossing heights one unit step at a time and
//! learns the action-value function
//!
//! ```text
//! Q(s, a) <- Q(s, a) + alpha * (r + gamma * max_a' Q(s', a') - Q(s, a))
//! ```
//!
//! States never seen before have an implicit all-zero row, so the bootstrap
//! term for an unexplored successor is 0. Epsilon follows the greedy side of
//! the coin: with probability `epsilon` the agent exploits the current best
//! action, otherwise it draws an action uniformly at random.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::medium::{InterfaceState, LayeredMedium, MoveAction};
use crate::score::{reward, RewardScale};

/// Hyperparameters and run lengths for a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    /// Probability of exploiting the greedy action (not of exploring).
    pub epsilon: f64,
    /// Learning rate in (0, 1].
    pub alpha: f64,
    /// Discount factor in [0, 1].
    pub gamma: f64,
    pub episodes: u32,
    pub rounds_per_episode: u32,
    pub seed: u64,
}

impl AgentConfig {
    /// Checks every hyperparameter range, naming the first offender.
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidHyperparameter {
                field: "epsilon",
                value: self.epsilon,
            });
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha > 1.0 {
            return Err(Error::InvalidHyperparameter {
                field: "alpha",
                value: self.alpha,
            });
        }
        if !self.gamma.is_finite() || !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidHyperparameter {
                field: "gamma",
                value: self.gamma,
            });
        }
        Ok(())
    }
}

/// Sparse action-value table: one row of `2K` values per visited state.
///
/// Rows are kept in a sorted map so that dumps and iteration are
/// reproducible run to run.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    num_actions: usize,
    rows: BTreeMap<InterfaceState, Vec<f64>>,
}

impl QTable {
    pub fn new(num_interfaces: usize) -> Self {
        QTable {
            num_actions: 2 * num_interfaces,
            rows: BTreeMap::new(),
        }
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Number of states with an explicit row (i.e. updated at least once).
    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The explicit row for a state, if the state has been updated.
    pub fn action_values(&self, state: &InterfaceState) -> Option<&[f64]> {
        self.rows.get(state).map(Vec::as_slice)
    }

    /// Q(s, a), with unvisited entries reading as 0.
    pub fn value(&self, state: &InterfaceState, action: MoveAction) -> f64 {
        self.rows
            .get(state)
            .map(|row| row[action.index()])
            .unwrap_or(0.0)
    }

    /// `max_a Q(s, a)`; 0 for unvisited states (the zero bootstrap).
    pub fn max_value(&self, state: &InterfaceState) -> f64 {
        match self.rows.get(state) {
            Some(row) => row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            None => 0.0,
        }
    }

    /// Indices of all actions tied for the maximum Q-value.
    pub fn best_actions(&self, state: &InterfaceState) -> Vec<usize> {
        match self.rows.get(state) {
            Some(row) => {
                let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (0..row.len()).filter(|&i| row[i] == best).collect()
            }
            None => (0..self.num_actions).collect(),
        }
    }

    /// The greedy action with ties broken by lowest index; deterministic.
    pub fn first_best_action(&self, state: &InterfaceState) -> MoveAction {
        let index = self.best_actions(state)[0];
        MoveAction::from_index(index)
    }

    /// One Q-learning update. Touches exactly the `(state, action)` entry;
    /// the successor is only read (and reads 0 if never updated).
    pub fn update(
        &mut self,
        state: &InterfaceState,
        action: MoveAction,
        reward: f64,
        next_state: &InterfaceState,
        alpha: f64,
        gamma: f64,
    ) {
        let bootstrap = self.max_value(next_state);
        let row = self
            .rows
            .entry(state.clone())
            .or_insert_with(|| alloc::vec![0.0; self.num_actions]);
        let entry = &mut row[action.index()];
        *entry += alpha * (reward + gamma * bootstrap - *entry);
    }

    /// Rows in sorted state order.
    pub fn iter(&self) -> impl Iterator<Item = (&InterfaceState, &[f64])> {
        self.rows.iter().map(|(s, row)| (s, row.as_slice()))
    }
}

/// Epsilon-greedy action choice.
///
/// Draws the exploit/explore coin first and one action index second, always
/// in that order, so a run consumes the random stream identically given the
/// same seed. Greedy ties are broken uniformly at random.
pub fn select_action<R: Rng>(
    table: &QTable,
    state: &InterfaceState,
    epsilon: f64,
    rng: &mut R,
) -> MoveAction {
    let exploit = rng.gen::<f64>() < epsilon;
    let index = if exploit {
        let candidates = table.best_actions(state);
        candidates[rng.gen_range(0..candidates.len())]
    } else {
        rng.gen_range(0..table.num_actions())
    };
    MoveAction::from_index(index)
}

/// Everything observable about one training round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub episode: u32,
    pub round: u32,
    /// State after the action was applied (clamping included).
    pub state_after: InterfaceState,
    pub action: MoveAction,
    /// Optical time of the path `state_after` describes.
    pub time: f64,
    /// Score of that path.
    pub r_score: f64,
    /// Score minus the episode-best score at the time of the move.
    pub reward: f64,
    /// Minimum time seen so far this episode, this round included.
    pub best_time: f64,
}

/// Runs one episode of `rounds_per_episode` moves from `s_ini`, updating the
/// table in place and returning the per-round log.
///
/// The episode-best score starts at the score of `s_ini`, and each round's
/// reward is computed against the best *before* the round is folded in, so
/// a round is rewarded exactly when it improves on everything the episode
/// has seen.
pub fn run_episode<R: Rng>(
    medium: &LayeredMedium,
    scale: RewardScale,
    table: &mut QTable,
    config: &AgentConfig,
    s_ini: &InterfaceState,
    episode: u32,
    rng: &mut R,
) -> Result<Vec<RoundRecord>> {
    config.validate()?;
    let mut state = s_ini.clone();
    let mut best_time = medium.path_time(&state)?;
    let mut best_score = scale.score(best_time);
    let mut records = Vec::with_capacity(config.rounds_per_episode as usize);
    for round in 0..config.rounds_per_episode {
        let action = select_action(table, &state, config.epsilon, rng);
        let next = medium.apply_action(&state, action)?;
        let time = medium.path_time(&next)?;
        let score = scale.score(time);
        let r = reward(score, best_score);
        table.update(&state, action, r, &next, config.alpha, config.gamma);
        if score > best_score {
            best_score = score;
            best_time = time;
        }
        records.push(RoundRecord {
            episode,
            round,
            state_after: next.clone(),
            action,
            time,
            r_score: score,
            reward: r,
            best_time,
        });
        state = next;
    }
    Ok(records)
}

/// Follows the learned policy greedily from `s_ini` (ties to the lowest
/// action index) until a state repeats or `max_steps` moves have been made,
/// and returns the least-time state visited along the way with its time.
///
/// Unvisited rows read as all-zero, so the walk is total; the least-time
/// filter makes the extraction robust to a policy that overshoots the
/// optimum and cycles around it.
pub fn greedy_state(
    medium: &LayeredMedium,
    table: &QTable,
    s_ini: &InterfaceState,
    max_steps: u32,
) -> Result<(InterfaceState, f64)> {
    let mut state = s_ini.clone();
    let mut best_state = state.clone();
    let mut best_time = medium.path_time(&state)?;
    let mut visited = BTreeSet::new();
    visited.insert(state.clone());
    for _ in 0..max_steps {
        let action = table.first_best_action(&state);
        let next = medium.apply_action(&state, action)?;
        if !visited.insert(next.clone()) {
            break;
        }
        let time = medium.path_time(&next)?;
        if time < best_time {
            best_time = time;
            best_state = next.clone();
        }
        state = next;
    }
    Ok((best_state, best_time))
}
