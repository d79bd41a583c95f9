//! Rules engine, decision agents, Monte-Carlo search and experiment harness
//! for a multistage solo cooperative card game.

pub mod agents;
pub mod cards;
pub mod experiments;
pub mod game;
pub mod search;
