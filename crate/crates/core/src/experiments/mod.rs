//! Batch simulation: play many independent games in parallel and summarize
//! them as a winrate with a binomial confidence interval.
//!
//! Game `i` of a batch is seeded by [`seed_for_game`]`(master_seed, i)` and
//! nothing else, so results do not depend on the number of workers or on
//! which other rows a sweep contains. Rows of a sweep or grid share the same
//! per-game seeds.

mod output;
mod runner;
mod stats;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::agents::{AgentKind, StagePolicyMap};
use crate::cards::{load_card_db, load_scenario, DataError};
use crate::game::{GameError, GameSetup};

pub use output::{csv_header, csv_row, write_csv, write_json, CSV_COLUMNS};
pub use runner::{play_game, seed_for_game, GameRecord, GameStreams};
pub use stats::{winrate_ci, RunStats, StatsError, DEFAULT_Z};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub games: u32,
    pub master_seed: u64,
    pub cards: PathBuf,
    pub scenario: PathBuf,
    pub difficulty: String,
    #[serde(serialize_with = "as_display")]
    pub policy_map: StagePolicyMap,
    pub workers: usize,
    pub z: f64,
}

fn as_display<S: serde::Serializer>(v: &StagePolicyMap, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.games == 0 {
            return Err(ExperimentError::Config("games must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(ExperimentError::Config("workers must be at least 1".into()));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(ExperimentError::Config(format!(
                "z must be positive, got {}",
                self.z
            )));
        }
        Ok(())
    }

    /// Loads card data and scenario and binds the difficulty.
    pub fn load_setup(&self) -> Result<Arc<GameSetup>, ExperimentError> {
        let db = Arc::new(load_card_db(&self.cards)?);
        let scenario = Arc::new(load_scenario(&self.scenario, &db)?);
        Ok(GameSetup::new(db, scenario, &self.difficulty)?)
    }
}

/// Plays `config.games` games and aggregates them.
pub fn run_games(config: &ExperimentConfig) -> Result<RunStats, ExperimentError> {
    config.validate()?;
    let setup = config.load_setup()?;
    run_games_with(&setup, config)
}

/// Like [`run_games`] with the card data already loaded.
pub fn run_games_with(
    setup: &Arc<GameSetup>,
    config: &ExperimentConfig,
) -> Result<RunStats, ExperimentError> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot start worker pool: {e}")))?;
    let records: Vec<GameRecord> = pool.install(|| {
        (0..config.games)
            .into_par_iter()
            .map(|i| {
                let streams = GameStreams::new(seed_for_game(config.master_seed, u64::from(i)));
                play_game(setup, &config.policy_map, streams, None)
            })
            .collect()
    });
    let wall = start.elapsed().as_secs_f64();
    Ok(RunStats::from_records(&records, config.z, wall)?)
}

/// One batch per budget, with the budget substituted into every search agent.
pub fn budget_sweep(
    base: &ExperimentConfig,
    budgets: &[u32],
) -> Result<Vec<(u32, RunStats)>, ExperimentError> {
    if budgets.is_empty() {
        return Err(ExperimentError::Config("no budgets given".into()));
    }
    if budgets.contains(&0) {
        return Err(ExperimentError::Config("budgets must be at least 1".into()));
    }
    if !base.policy_map.has_search_agent() {
        return Err(ExperimentError::Config(
            "budget sweep needs a search agent (flat or mcts) in the stage map".into(),
        ));
    }
    base.validate()?;
    let setup = base.load_setup()?;
    budgets
        .iter()
        .map(|&b| {
            let mut cfg = base.clone();
            cfg.policy_map = base.policy_map.with_budget(b);
            Ok((b, run_games_with(&setup, &cfg)?))
        })
        .collect()
}

/// Candidate agents per configurable stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageChoices {
    pub planning: Vec<AgentKind>,
    pub commit: Vec<AgentKind>,
    pub defense: Vec<AgentKind>,
}

impl StageChoices {
    /// Every assignment, planning varying slowest and defense fastest.
    pub fn assignments(&self, attack: Option<AgentKind>) -> Vec<StagePolicyMap> {
        let mut out = Vec::new();
        for &planning in &self.planning {
            for &commit in &self.commit {
                for &defense in &self.defense {
                    out.push(StagePolicyMap {
                        planning,
                        commit,
                        defense,
                        attack,
                    });
                }
            }
        }
        out
    }
}

/// One batch per element of the Cartesian product of stage choices.
pub fn combination_grid(
    base: &ExperimentConfig,
    choices: &StageChoices,
) -> Result<Vec<(StagePolicyMap, RunStats)>, ExperimentError> {
    for (stage, list) in [
        ("planning", &choices.planning),
        ("commit", &choices.commit),
        ("defense", &choices.defense),
    ] {
        if list.is_empty() {
            return Err(ExperimentError::Config(format!(
                "no agent choices for {stage}"
            )));
        }
    }
    base.validate()?;
    let setup = base.load_setup()?;
    choices
        .assignments(base.policy_map.attack)
        .into_iter()
        .map(|map| {
            let mut cfg = base.clone();
            cfg.policy_map = map;
            Ok((map, run_games_with(&setup, &cfg)?))
        })
        .collect()
}
