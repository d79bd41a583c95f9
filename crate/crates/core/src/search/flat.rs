use rand::Rng;

use super::playout::{playout_rng, rollout};
use super::{SearchConfig, SearchReport};
use crate::agents::DecisionPolicy;
use crate::game::{Action, GameRng, GameState};

/// Agent 3: one tree level, budget split evenly across children.
#[derive(Clone, Debug)]
pub struct FlatMonteCarlo {
    pub config: SearchConfig,
}

/// Playouts per child: `budget / children` each, the remainder going one by
/// one to the earliest children.
pub fn allocate_budget(budget: u32, children: usize) -> Vec<u32> {
    let n = children as u32;
    let (base, extra) = (budget / n, budget % n);
    (0..n).map(|i| base + u32::from(i < extra)).collect()
}

/// Index of the child with the most wins; the first one on ties.
pub fn most_wins(wins: &[u32]) -> usize {
    let mut best = 0;
    for (i, &w) in wins.iter().enumerate() {
        if w > wins[best] {
            best = i;
        }
    }
    best
}

impl FlatMonteCarlo {
    pub fn new(config: SearchConfig) -> Self {
        Self { config }
    }

    pub fn search(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> SearchReport {
        assert!(!legals.is_empty(), "search needs at least one legal action");
        if legals.len() == 1 {
            return SearchReport {
                action: legals[0].clone(),
                playouts: 0,
                children: vec![(legals[0].clone(), 0, 0)],
            };
        }
        let base: u64 = rng.gen();
        let allocation = allocate_budget(self.config.playout_budget, legals.len());
        let mut wins = vec![0u32; legals.len()];
        let mut playouts = 0;
        for (i, (action, &runs)) in legals.iter().zip(&allocation).enumerate() {
            if runs == 0 {
                continue;
            }
            let mut child = state.clone();
            child.apply(action).expect("legal action applies");
            for k in 0..runs {
                let mut rng = playout_rng(base, k);
                let mut sample = child.clone();
                sample.determinize(&mut rng);
                let outcome = rollout(
                    &mut sample,
                    self.config.playout,
                    &mut rng,
                    self.config.round_cap,
                );
                wins[i] += u32::from(outcome.is_win());
                playouts += 1;
            }
        }
        let best = most_wins(&wins);
        SearchReport {
            action: legals[best].clone(),
            playouts,
            children: legals
                .iter()
                .cloned()
                .zip(wins.iter().copied().zip(allocation.iter().copied()))
                .map(|(a, (w, v))| (a, w, v))
                .collect(),
        }
    }
}

impl DecisionPolicy for FlatMonteCarlo {
    fn decide(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> Action {
        self.search(state, legals, rng).action
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split() {
        assert_eq!(allocate_budget(40, 8), vec![5; 8]);
    }

    #[test]
    fn remainder_goes_to_earliest() {
        assert_eq!(allocate_budget(10, 3), vec![4, 3, 3]);
        assert_eq!(allocate_budget(3, 5), vec![1, 1, 1, 0, 0]);
    }

    #[test]
    fn ties_pick_first() {
        assert_eq!(most_wins(&[2, 5, 5, 1]), 1);
        assert_eq!(most_wins(&[0, 0, 0]), 0);
    }
}
