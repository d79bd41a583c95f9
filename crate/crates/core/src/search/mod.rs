//! Monte-Carlo search agents.
//!
//! [`FlatMonteCarlo`] splits the playout budget evenly over the root's
//! children and keeps the child with the most wins. [`MctsUcb`] grows a tree
//! over successive decision stages with UCB selection. Both only ever see a
//! determinized copy of the game: before every playout the hidden zones are
//! reshuffled, so the real deck order never reaches the search.

mod flat;
mod mcts;
mod playout;

pub use flat::{allocate_budget, most_wins, FlatMonteCarlo};
pub use mcts::{MctsUcb, SearchNode, SearchTree};
pub use playout::{playout, rollout, DEFAULT_ROUND_CAP};

use crate::agents::{PlayoutPolicy, DEFAULT_EXPLORATION};
use crate::game::Action;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Playouts per decision.
    pub playout_budget: u32,
    /// UCB exploration constant, in [0, 1].
    pub exploration: f64,
    pub playout: PlayoutPolicy,
    /// Rounds a single playout may last before it is scored as a loss.
    pub round_cap: u32,
    /// Deepest tree level that may receive children; `None` is unbounded.
    /// A value of 1 restricts the tree to the root's children.
    pub max_depth: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            playout_budget: 40,
            exploration: DEFAULT_EXPLORATION,
            playout: PlayoutPolicy::Expert,
            round_cap: DEFAULT_ROUND_CAP,
            max_depth: None,
        }
    }
}

/// Result of one search decision.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub action: Action,
    /// Playouts actually run.
    pub playouts: u64,
    /// Per root child: action, wins, visits.
    pub children: Vec<(Action, u32, u32)>,
}

/// Upper confidence bound of a child: its win ratio plus the exploration
/// term `c * sqrt(2 ln n / n_j)`. Callers give unvisited children priority
/// instead of calling this with `visits == 0`.
pub fn ucb_score(wins: u32, visits: u32, parent_visits: u32, c: f64) -> f64 {
    debug_assert!(visits >= 1 && parent_visits >= 1);
    let n_j = f64::from(visits);
    let mean = f64::from(wins) / n_j;
    if c == 0.0 {
        return mean;
    }
    mean + c * (2.0 * f64::from(parent_visits).ln() / n_j).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ucb_zero_exploration_is_win_ratio() {
        assert_eq!(ucb_score(6, 10, 100, 0.0), 0.6);
        assert_eq!(ucb_score(0, 3, 7, 0.0), 0.0);
    }

    #[test]
    fn ucb_symmetric_siblings() {
        assert_eq!(ucb_score(3, 5, 20, 0.7), ucb_score(3, 5, 20, 0.7));
    }

    #[test]
    fn ucb_single_parent_visit_has_no_bonus() {
        // ln 1 = 0
        assert_eq!(ucb_score(1, 1, 1, 1.0), 1.0);
    }
}
