//! The rules engine.
//!
//! A round is a fixed pipeline of 13 stages. Ruled stages are resolved by
//! [`advance_ruled_stage`], the two random stages by [`resolve_random_stage`]
//! with an injected random source, and the five decision stages only change
//! through [`apply_action`] with one of the [`legal_actions`]. The engine
//! holds no randomness of its own.

mod action;
mod legal;
mod rules;
mod stage;
mod state;

use std::fmt;

use thiserror::Error;

pub use action::Action;
pub use legal::PLANNING_SUBSET_CAP;
pub use rules::RandomEvent;
pub use stage::{Phase, StageId, StageKind};
pub use state::{CardInstance, GameSetup, GameState, Outcome, Zone};

/// Random source used everywhere in the engine, agents and search.
pub type GameRng = rand_chacha::ChaCha8Rng;

/// Stable handle of one card instance within a game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceId(pub u16);

impl InstanceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("{op} called at {stage}, which is a {kind} stage")]
    WrongStage {
        op: &'static str,
        stage: StageId,
        kind: StageKind,
    },
    #[error("{action} cannot be applied at {stage}")]
    ActionStageMismatch {
        action: &'static str,
        stage: StageId,
    },
    #[error("illegal action: {0}")]
    IllegalAction(String),
    #[error("game is over ({0:?})")]
    GameOver(Outcome),
    #[error("unknown difficulty `{0}`")]
    UnknownDifficulty(String),
}

pub fn new_game(setup: &std::sync::Arc<GameSetup>, rng: &mut GameRng) -> GameState {
    GameState::new(setup, rng)
}

pub fn legal_actions(state: &GameState) -> Result<Vec<Action>, GameError> {
    state.legal_actions()
}

pub fn apply_action(state: &GameState, action: &Action) -> Result<GameState, GameError> {
    let mut next = state.clone();
    next.apply(action)?;
    Ok(next)
}

pub fn advance_ruled_stage(state: &GameState) -> Result<GameState, GameError> {
    let mut next = state.clone();
    next.advance_ruled()?;
    Ok(next)
}

pub fn resolve_random_stage(state: &GameState, rng: &mut GameRng) -> Result<GameState, GameError> {
    let mut next = state.clone();
    next.resolve_random(rng)?;
    Ok(next)
}

pub fn is_terminal(state: &GameState) -> Option<Outcome> {
    state.outcome()
}

/// Fully independent deep copy.
pub fn snapshot(state: &GameState) -> GameState {
    state.clone()
}
