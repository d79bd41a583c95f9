//! Decision policies.
//!
//! Every agent answers the same question: given a state at a decision stage
//! and the legal actions there, which action to take. The random and expert
//! agents live here together with the fixed rules used by every agent for
//! Travel and DeclareAttackers; the two search agents are in
//! [`crate::search`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::cards::{CardKind, Sphere};
use crate::game::{Action, GameRng, GameState, InstanceId, StageId, Zone};
use crate::search::{FlatMonteCarlo, MctsUcb, SearchConfig};

pub trait DecisionPolicy: Send + Sync {
    /// Picks one of `legals`. `legals` is never empty.
    fn decide(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> Action;
}

/// Policy used inside playouts for the configurable decision stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlayoutPolicy {
    Random,
    Expert,
}

impl PlayoutPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            PlayoutPolicy::Random => "random",
            PlayoutPolicy::Expert => "expert",
        }
    }

    /// Chooses an action for a configurable decision stage during a playout.
    pub fn act(self, state: &GameState, rng: &mut GameRng) -> Action {
        match self {
            PlayoutPolicy::Expert => expert_action(state),
            PlayoutPolicy::Random => {
                let legals = state
                    .legal_actions()
                    .expect("playout asks at a decision stage");
                random_decide(state, &legals, rng)
            }
        }
    }
}

impl FromStr for PlayoutPolicy {
    type Err = AgentParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(PlayoutPolicy::Random),
            "expert" => Ok(PlayoutPolicy::Expert),
            other => Err(AgentParseError::Playout(other.to_owned())),
        }
    }
}

impl fmt::Display for PlayoutPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_EXPLORATION: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AgentKind {
    Random,
    Expert,
    FlatMc {
        budget: u32,
        playout: PlayoutPolicy,
    },
    MctsUcb {
        budget: u32,
        exploration: f64,
        playout: PlayoutPolicy,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentParseError {
    #[error("unknown agent `{0}` (expected random, expert, flat:<budget>:<playout> or mcts:<budget>:<C>:<playout>)")]
    Unknown(String),
    #[error("invalid playout budget `{0}` (must be an integer >= 1)")]
    Budget(String),
    #[error("invalid exploration constant `{0}` (must lie in [0, 1])")]
    Exploration(String),
    #[error("invalid playout policy `{0}` (expected random or expert)")]
    Playout(String),
    #[error("invalid stage assignment `{0}` (expected <stage>=<agent>)")]
    Assignment(String),
    #[error("unknown stage `{0}` (expected planning, commit, defense or attack)")]
    Stage(String),
    #[error("no agent assigned to {0}")]
    MissingStage(&'static str),
}

impl AgentKind {
    /// Number used for this agent family in result tables: 1 random,
    /// 2 expert, 3 flat Monte-Carlo, 4 MCTS-UCB.
    pub fn number(&self) -> u8 {
        match self {
            AgentKind::Random => 1,
            AgentKind::Expert => 2,
            AgentKind::FlatMc { .. } => 3,
            AgentKind::MctsUcb { .. } => 4,
        }
    }

    pub fn is_search(&self) -> bool {
        matches!(self, AgentKind::FlatMc { .. } | AgentKind::MctsUcb { .. })
    }

    /// Same agent with the playout budget replaced; non-search agents are
    /// returned unchanged.
    pub fn with_budget(self, new_budget: u32) -> Self {
        match self {
            AgentKind::FlatMc { playout, .. } => AgentKind::FlatMc {
                budget: new_budget,
                playout,
            },
            AgentKind::MctsUcb {
                exploration,
                playout,
                ..
            } => AgentKind::MctsUcb {
                budget: new_budget,
                exploration,
                playout,
            },
            other => other,
        }
    }

    pub fn build(&self) -> Box<dyn DecisionPolicy> {
        match *self {
            AgentKind::Random => Box::new(RandomAgent),
            AgentKind::Expert => Box::new(ExpertAgent),
            AgentKind::FlatMc { budget, playout } => Box::new(FlatMonteCarlo::new(SearchConfig {
                playout_budget: budget,
                playout,
                ..SearchConfig::default()
            })),
            AgentKind::MctsUcb {
                budget,
                exploration,
                playout,
            } => Box::new(MctsUcb::new(SearchConfig {
                playout_budget: budget,
                exploration,
                playout,
                ..SearchConfig::default()
            })),
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentKind::Random => f.write_str("random"),
            AgentKind::Expert => f.write_str("expert"),
            AgentKind::FlatMc { budget, playout } => write!(f, "flat:{budget}:{playout}"),
            AgentKind::MctsUcb {
                budget,
                exploration,
                playout,
            } => write!(f, "mcts:{budget}:{exploration}:{playout}"),
        }
    }
}

fn parse_budget(s: &str) -> Result<u32, AgentParseError> {
    match s.parse::<u32>() {
        Ok(b) if b >= 1 => Ok(b),
        _ => Err(AgentParseError::Budget(s.to_owned())),
    }
}

impl FromStr for AgentKind {
    type Err = AgentParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["random"] => Ok(AgentKind::Random),
            ["expert"] => Ok(AgentKind::Expert),
            ["flat", budget, playout] => Ok(AgentKind::FlatMc {
                budget: parse_budget(budget)?,
                playout: playout.parse()?,
            }),
            ["mcts", budget, c, playout] => {
                let exploration = c
                    .parse::<f64>()
                    .ok()
                    .filter(|c| (0.0..=1.0).contains(c))
                    .ok_or_else(|| AgentParseError::Exploration((*c).to_owned()))?;
                Ok(AgentKind::MctsUcb {
                    budget: parse_budget(budget)?,
                    exploration,
                    playout: playout.parse()?,
                })
            }
            _ => Err(AgentParseError::Unknown(s.to_owned())),
        }
    }
}

/// Which agent decides at each decision stage. Travel always follows
/// [`default_travel`]; DeclareAttackers follows [`default_attack`] unless
/// `attack` overrides it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StagePolicyMap {
    pub planning: AgentKind,
    pub commit: AgentKind,
    pub defense: AgentKind,
    pub attack: Option<AgentKind>,
}

impl StagePolicyMap {
    pub fn uniform(kind: AgentKind) -> Self {
        Self {
            planning: kind,
            commit: kind,
            defense: kind,
            attack: None,
        }
    }

    pub fn agent_for(&self, stage: StageId) -> Option<&AgentKind> {
        match stage {
            StageId::Planning => Some(&self.planning),
            StageId::CommitCharacters => Some(&self.commit),
            StageId::DeclareDefenders => Some(&self.defense),
            StageId::DeclareAttackers => self.attack.as_ref(),
            _ => None,
        }
    }

    pub fn configurable_mut(&mut self) -> [&mut AgentKind; 3] {
        [&mut self.planning, &mut self.commit, &mut self.defense]
    }

    pub fn has_search_agent(&self) -> bool {
        [
            Some(self.planning),
            Some(self.commit),
            Some(self.defense),
            self.attack,
        ]
        .iter()
        .flatten()
        .any(AgentKind::is_search)
    }

    /// Replaces the budget of every search agent.
    pub fn with_budget(mut self, budget: u32) -> Self {
        for k in self.configurable_mut() {
            *k = k.with_budget(budget);
        }
        self.attack = self.attack.map(|k| k.with_budget(budget));
        self
    }

    /// Agent numbers for Planning, Commit and Defense, e.g. `4-2-4`.
    pub fn short_label(&self) -> String {
        format!(
            "{}-{}-{}",
            self.planning.number(),
            self.commit.number(),
            self.defense.number()
        )
    }
}

impl fmt::Display for StagePolicyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "planning={},commit={},defense={}",
            self.planning, self.commit, self.defense
        )?;
        if let Some(a) = &self.attack {
            write!(f, ",attack={a}")?;
        }
        Ok(())
    }
}

/// Parses `planning=A,commit=B,defense=C[,attack=D]`. `all=A` (or a bare
/// agent string) assigns the three configurable stages at once.
impl FromStr for StagePolicyMap {
    type Err = AgentParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mut planning, mut commit, mut defense, mut attack) = (None, None, None, None);
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (stage, agent) = match item.split_once('=') {
                Some((stage, agent)) => (stage.trim(), agent.trim()),
                None if !s.contains('=') => ("all", item),
                None => return Err(AgentParseError::Assignment(item.to_owned())),
            };
            let kind: AgentKind = agent.parse()?;
            match stage {
                "planning" => planning = Some(kind),
                "commit" => commit = Some(kind),
                "defense" | "defence" => defense = Some(kind),
                "attack" => attack = Some(kind),
                "all" => {
                    planning = Some(kind);
                    commit = Some(kind);
                    defense = Some(kind);
                }
                other => return Err(AgentParseError::Stage(other.to_owned())),
            }
        }
        Ok(StagePolicyMap {
            planning: planning.ok_or(AgentParseError::MissingStage("planning"))?,
            commit: commit.ok_or(AgentParseError::MissingStage("commit"))?,
            defense: defense.ok_or(AgentParseError::MissingStage("defense"))?,
            attack,
        })
    }
}

/// Agent 1: uniform choice over the legal actions.
pub struct RandomAgent;

impl DecisionPolicy for RandomAgent {
    fn decide(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> Action {
        random_decide(state, legals, rng)
    }
}

/// Uniform choice. The legality filters (willpower above threat, one
/// defender per enemy) are already part of `legals`, so a uniform draw is the
/// same as drawing candidates until one satisfies them.
pub fn random_decide(_state: &GameState, legals: &[Action], rng: &mut GameRng) -> Action {
    legals[rng.gen_range(0..legals.len())].clone()
}

/// Agent 2: fixed expert rules. Ignores the random source.
pub struct ExpertAgent;

impl DecisionPolicy for ExpertAgent {
    fn decide(&self, state: &GameState, legals: &[Action], rng: &mut GameRng) -> Action {
        expert_decide(state, legals, rng)
    }
}

pub fn expert_decide(state: &GameState, legals: &[Action], _rng: &mut GameRng) -> Action {
    let wanted = expert_action(state);
    if legals.contains(&wanted) {
        return wanted;
    }
    // Planning may offer only part of the wish list when its subset cap kicks
    // in: take the longest affordable prefix that is on offer.
    if let Action::PlayCards(order) = expert_purchase_order(state) {
        for len in (0..order.len()).rev() {
            let candidate = Action::PlayCards(order[..len].to_vec()).canonical();
            if legals.contains(&candidate) {
                return candidate;
            }
        }
    }
    legals[0].clone()
}

/// The expert's action computed straight from the rules, without consulting
/// a legal-action list.
pub fn expert_action(state: &GameState) -> Action {
    match state.stage() {
        StageId::Planning => expert_purchase_order(state).canonical(),
        StageId::CommitCharacters => expert_commit(state),
        StageId::DeclareDefenders => expert_defense(state),
        StageId::Travel => travel_rule(state),
        StageId::DeclareAttackers => attack_rule(state),
        stage => panic!("expert asked to act at non-decision stage {stage}"),
    }
}

fn is_gandalf(state: &GameState, id: InstanceId) -> bool {
    state.def_of(id).id == "gandalf"
}

/// Purchases in the order the expert makes them: Gandalf whenever
/// affordable, then Spirit cards by descending willpower, then the cheapest
/// remaining card; repeated until nothing else is affordable.
fn expert_purchase_order(state: &GameState) -> Action {
    let hand = state.ids_in(Zone::Hand);
    let mut chosen: Vec<InstanceId> = Vec::new();
    loop {
        let affordable: Vec<InstanceId> = hand
            .iter()
            .copied()
            .filter(|id| !chosen.contains(id))
            .filter(|&id| {
                let mut trial = chosen.clone();
                trial.push(id);
                state.can_afford(&trial)
            })
            .collect();
        if affordable.is_empty() {
            break;
        }
        let key = |id: &InstanceId| (&state.def_of(*id).id, *id);
        let pick = affordable
            .iter()
            .copied()
            .find(|&id| is_gandalf(state, id))
            .or_else(|| {
                affordable
                    .iter()
                    .copied()
                    .filter(|&id| state.def_of(id).sphere == Sphere::Spirit)
                    .min_by(|a, b| {
                        let (da, db) = (state.def_of(*a), state.def_of(*b));
                        db.willpower.cmp(&da.willpower).then(key(a).cmp(&key(b)))
                    })
            })
            .or_else(|| {
                affordable.iter().copied().min_by(|a, b| {
                    let (da, db) = (state.def_of(*a), state.def_of(*b));
                    da.cost.cmp(&db.cost).then(key(a).cmp(&key(b)))
                })
            })
            .expect("affordable is non-empty");
        chosen.push(pick);
    }
    Action::PlayCards(chosen)
}

/// Gandalf first, then Spirit characters by descending willpower, until the
/// committed willpower exceeds the staging threat. Commits nobody when that
/// total cannot be reached.
fn expert_commit(state: &GameState) -> Action {
    let threat = state.staging_threat();
    let mut pool: Vec<(InstanceId, u32, bool)> = state
        .ready_characters()
        .into_iter()
        .filter(|&id| state.willpower(id) > 0)
        .filter(|&id| is_gandalf(state, id) || state.def_of(id).sphere == Sphere::Spirit)
        .map(|id| (id, state.willpower(id), is_gandalf(state, id)))
        .collect();
    pool.sort_by(|a, b| b.2.cmp(&a.2).then(b.1.cmp(&a.1)).then(a.0.cmp(&b.0)));
    let mut chosen = Vec::new();
    let mut total = 0i32;
    for (id, w, _) in pool {
        if total > threat {
            break;
        }
        chosen.push(id);
        total += w as i32;
    }
    if total > threat {
        Action::Commit(chosen).canonical()
    } else {
        Action::Commit(Vec::new())
    }
}

/// Allies defend first (cheapest first), heroes last (sturdiest first).
/// Enemies are served in order of descending attack.
fn expert_defense(state: &GameState) -> Action {
    let mut enemies = state.engaged_enemies();
    enemies.sort_by(|a, b| {
        state
            .attack_of_enemy(*b)
            .cmp(&state.attack_of_enemy(*a))
            .then(a.cmp(b))
    });
    let ready = state.ready_characters();
    let (mut allies, mut heroes): (Vec<InstanceId>, Vec<InstanceId>) = ready
        .into_iter()
        .partition(|&id| state.kind_of(id) == CardKind::Ally);
    allies.sort_by_key(|&id| (state.def_of(id).cost, id));
    heroes.sort_by(|a, b| state.defense(*b).cmp(&state.defense(*a)).then(a.cmp(b)));
    let mut defenders = allies.into_iter().chain(heroes);
    let pairs = enemies.into_iter().map(|e| (e, defenders.next())).collect();
    Action::Defend(pairs).canonical()
}

/// Travel rule shared by all agents: with no active location, go to the
/// staging-area location with the highest threat (lowest id on ties).
pub fn default_travel(state: &GameState, legals: &[Action]) -> Action {
    let action = travel_rule(state);
    debug_assert!(legals.contains(&action));
    action
}

pub fn travel_rule(state: &GameState) -> Action {
    if state.first_in(Zone::ActiveLocation).is_some() {
        return Action::TravelTo(None);
    }
    let target = state
        .in_zone(Zone::StagingArea)
        .filter(|c| state.db().def(c.def).kind == CardKind::Location)
        .max_by(|a, b| {
            let (ta, tb) = (state.db().def(a.def).threat, state.db().def(b.def).threat);
            ta.cmp(&tb).then(b.id.cmp(&a.id))
        })
        .map(|c| c.id);
    Action::TravelTo(target)
}

/// Attack rule shared by all agents: every ready character attacks the
/// engaged enemy with the fewest remaining hit points (lowest id on ties).
pub fn default_attack(state: &GameState, legals: &[Action]) -> Action {
    let action = attack_rule(state);
    debug_assert!(legals.contains(&action));
    action
}

pub fn attack_rule(state: &GameState) -> Action {
    let ready = state.ready_characters();
    let target = state
        .engaged_enemies()
        .into_iter()
        .min_by_key(|&e| (state.remaining_hit_points(e), e));
    match target {
        Some(e) if !ready.is_empty() => Action::Attack(vec![(e, ready)]),
        _ => Action::Attack(Vec::new()),
    }
}

/// Policy for a stage given the game's map. Travel and unmapped attacks fall
/// back to the fixed rules.
pub struct StagePolicies {
    planning: Box<dyn DecisionPolicy>,
    commit: Box<dyn DecisionPolicy>,
    defense: Box<dyn DecisionPolicy>,
    attack: Box<dyn DecisionPolicy>,
    travel: Box<dyn DecisionPolicy>,
    map: StagePolicyMap,
}

struct TravelRule;

impl DecisionPolicy for TravelRule {
    fn decide(&self, state: &GameState, legals: &[Action], _rng: &mut GameRng) -> Action {
        default_travel(state, legals)
    }
}

struct AttackRule;

impl DecisionPolicy for AttackRule {
    fn decide(&self, state: &GameState, legals: &[Action], _rng: &mut GameRng) -> Action {
        default_attack(state, legals)
    }
}

impl StagePolicies {
    pub fn new(map: &StagePolicyMap) -> Self {
        Self {
            planning: map.planning.build(),
            commit: map.commit.build(),
            defense: map.defense.build(),
            attack: map
                .attack
                .map_or_else(|| Box::new(AttackRule) as _, |k| k.build()),
            travel: Box::new(TravelRule),
            map: *map,
        }
    }

    pub fn map(&self) -> &StagePolicyMap {
        &self.map
    }

    pub fn for_stage(&self, stage: StageId) -> &dyn DecisionPolicy {
        match stage {
            StageId::Planning => self.planning.as_ref(),
            StageId::CommitCharacters => self.commit.as_ref(),
            StageId::Travel => self.travel.as_ref(),
            StageId::DeclareDefenders => self.defense.as_ref(),
            StageId::DeclareAttackers => self.attack.as_ref(),
            stage => panic!("no policy for non-decision stage {stage}"),
        }
    }

    /// Whether the stage is decided by a search agent.
    pub fn is_search_stage(&self, stage: StageId) -> bool {
        self.map.agent_for(stage).is_some_and(AgentKind::is_search)
    }
}
