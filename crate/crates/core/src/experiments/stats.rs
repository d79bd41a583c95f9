use serde::Serialize;
use thiserror::Error;

use super::runner::GameRecord;
use crate::game::Outcome;

/// Normal quantile for a two-sided 95% interval.
pub const DEFAULT_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("confidence interval needs at least one trial")]
    NoTrials,
    #[error("{wins} wins out of {n} trials")]
    TooManyWins { wins: u64, n: u64 },
}

/// Winrate `wins / n` and the half-width `z * sqrt(p (1 - p) / n)` of its
/// normal-approximation binomial confidence interval.
pub fn winrate_ci(wins: u64, n: u64, z: f64) -> Result<(f64, f64), StatsError> {
    if n == 0 {
        return Err(StatsError::NoTrials);
    }
    if wins > n {
        return Err(StatsError::TooManyWins { wins, n });
    }
    let p = wins as f64 / n as f64;
    Ok((p, z * (p * (1.0 - p) / n as f64).sqrt()))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OutcomeCounts {
    pub win: u64,
    pub loss_threat: u64,
    pub loss_heroes_dead: u64,
    pub loss_deck_empty: u64,
}

/// Summary of a batch of games.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunStats {
    pub n: u64,
    pub wins: u64,
    pub winrate: f64,
    pub ci_halfwidth: f64,
    pub mean_rounds: f64,
    pub outcomes: OutcomeCounts,
    /// Wall-clock time of the whole batch.
    pub wall_time_s: f64,
    /// Mean of per-game durations (independent of the worker count).
    pub mean_game_time_s: f64,
    /// Mean time per decision at stages handled by a search agent.
    pub mean_decision_time_search_s: f64,
    /// Mean time per decision at all other decision stages.
    pub mean_decision_time_other_s: f64,
}

impl RunStats {
    pub fn from_records(
        records: &[GameRecord],
        z: f64,
        wall_time_s: f64,
    ) -> Result<Self, StatsError> {
        let n = records.len() as u64;
        let mut outcomes = OutcomeCounts::default();
        for r in records {
            match r.outcome {
                Outcome::Win => outcomes.win += 1,
                Outcome::LossThreat => outcomes.loss_threat += 1,
                Outcome::LossHeroesDead => outcomes.loss_heroes_dead += 1,
                Outcome::LossDeckEmpty => outcomes.loss_deck_empty += 1,
            }
        }
        let wins = outcomes.win;
        let (winrate, ci_halfwidth) = winrate_ci(wins, n, z)?;
        let rounds: u64 = records.iter().map(|r| u64::from(r.rounds)).sum();
        let mean = |total: f64, count: u64| {
            if count == 0 {
                0.0
            } else {
                total / count as f64
            }
        };
        let search_count = records.iter().map(|r| r.search_decisions).sum();
        let other_count = records.iter().map(|r| r.other_decisions).sum();
        Ok(Self {
            n,
            wins,
            winrate,
            ci_halfwidth,
            mean_rounds: mean(rounds as f64, n),
            outcomes,
            wall_time_s,
            mean_game_time_s: mean(records.iter().map(|r| r.game_time_s).sum(), n),
            mean_decision_time_search_s: mean(
                records.iter().map(|r| r.search_time_s).sum(),
                search_count,
            ),
            mean_decision_time_other_s: mean(
                records.iter().map(|r| r.other_time_s).sum(),
                other_count,
            ),
        })
    }

    pub fn ci_low(&self) -> f64 {
        self.winrate - self.ci_halfwidth
    }

    pub fn ci_high(&self) -> f64 {
        self.winrate + self.ci_halfwidth
    }

    /// Equality of everything except timings.
    pub fn same_results(&self, other: &RunStats) -> bool {
        self.n == other.n
            && self.wins == other.wins
            && self.winrate == other.winrate
            && self.ci_halfwidth == other.ci_halfwidth
            && self.mean_rounds == other.mean_rounds
            && self.outcomes == other.outcomes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_have_zero_width() {
        assert_eq!(winrate_ci(0, 50, DEFAULT_Z).unwrap(), (0.0, 0.0));
        assert_eq!(winrate_ci(50, 50, DEFAULT_Z).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn rejects_empty_and_impossible() {
        assert_eq!(winrate_ci(0, 0, DEFAULT_Z), Err(StatsError::NoTrials));
        assert!(winrate_ci(3, 2, DEFAULT_Z).is_err());
    }
}
