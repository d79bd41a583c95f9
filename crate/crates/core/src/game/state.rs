use std::sync::Arc;

use rand::seq::SliceRandom;

use super::{GameError, GameRng, InstanceId, StageId};
use crate::cards::{CardDb, CardDef, CardKind, DefIndex, Scenario, Sphere, StatBuff};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    PlayerDeck,
    Hand,
    PlayArea,
    StagingArea,
    EncounterDeck,
    EngagementArea,
    ActiveLocation,
    PlayerDiscard,
    EncounterDiscard,
    /// Current and upcoming quest cards.
    QuestDeck,
    CompletedQuests,
    /// Face-down shadow cards dealt to engaged enemies.
    Shadow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Win,
    LossThreat,
    LossHeroesDead,
    LossDeckEmpty,
}

impl Outcome {
    pub fn is_win(self) -> bool {
        self == Outcome::Win
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardInstance {
    pub id: InstanceId,
    pub def: DefIndex,
    pub zone: Zone,
    /// Damage on characters and enemies; progress tokens on locations.
    pub damage: u32,
    pub exhausted: bool,
    pub resource_pool: u32,
    pub committed: bool,
    pub shadow_card: Option<InstanceId>,
    /// Hero an item is attached to.
    pub attached_to: Option<InstanceId>,
    /// On an engaged enemy: the character declared as its defender this round.
    pub defended_by: Option<InstanceId>,
    /// On a character: the enemy it was declared to attack this round.
    pub attacking: Option<InstanceId>,
}

/// Everything a game needs that never changes: card data, scenario and the
/// chosen difficulty. Shared read-only between games and threads.
#[derive(Debug, PartialEq, Eq)]
pub struct GameSetup {
    db: Arc<CardDb>,
    scenario: Arc<Scenario>,
    difficulty: String,
    /// Definition and starting zone of every instance, by instance id.
    layout: Vec<(DefIndex, Zone)>,
}

impl GameSetup {
    pub fn new(
        db: Arc<CardDb>,
        scenario: Arc<Scenario>,
        difficulty: &str,
    ) -> Result<Arc<Self>, GameError> {
        let encounter = scenario
            .encounter_decks
            .get(difficulty)
            .ok_or_else(|| GameError::UnknownDifficulty(difficulty.to_owned()))?;
        let idx = |id: &str| {
            db.index_of(id)
                .unwrap_or_else(|| panic!("scenario references unknown card `{id}`"))
        };
        let mut layout = Vec::new();
        for id in &scenario.heroes {
            layout.push((idx(id), Zone::PlayArea));
        }
        for id in &scenario.quest_line {
            layout.push((idx(id), Zone::QuestDeck));
        }
        for (id, &n) in &scenario.player_deck {
            layout.extend((0..n).map(|_| (idx(id), Zone::PlayerDeck)));
        }
        for (id, &n) in encounter {
            layout.extend((0..n).map(|_| (idx(id), Zone::EncounterDeck)));
        }
        assert!(layout.len() <= u16::MAX as usize, "too many cards");
        Ok(Arc::new(Self {
            db,
            scenario,
            difficulty: difficulty.to_owned(),
            layout,
        }))
    }

    pub fn db(&self) -> &CardDb {
        &self.db
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn difficulty(&self) -> &str {
        &self.difficulty
    }

    pub fn threat_limit(&self) -> i32 {
        self.scenario.threat_limit as i32
    }
}

pub const STARTING_HAND: usize = 6;

/// Full game snapshot. `Clone` is a deep copy of all mutable state; the
/// setup is shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    pub(super) setup: Arc<GameSetup>,
    pub(super) round: u32,
    pub(super) stage: StageId,
    pub(super) threat_level: i32,
    pub(super) quest_index: u8,
    pub(super) quest_progress: i32,
    pub(super) cards: Vec<CardInstance>,
    /// Deck orders, top of deck last.
    pub(super) player_deck: Vec<InstanceId>,
    pub(super) encounter_deck: Vec<InstanceId>,
    pub(super) outcome: Option<Outcome>,
}

impl GameState {
    pub(super) fn new(setup: &Arc<GameSetup>, rng: &mut GameRng) -> Self {
        let cards: Vec<CardInstance> = setup
            .layout
            .iter()
            .enumerate()
            .map(|(i, &(def, zone))| CardInstance {
                id: InstanceId(i as u16),
                def,
                zone,
                damage: 0,
                exhausted: false,
                resource_pool: 0,
                committed: false,
                shadow_card: None,
                attached_to: None,
                defended_by: None,
                attacking: None,
            })
            .collect();
        let in_zone = |z| {
            cards
                .iter()
                .filter(|c| c.zone == z)
                .map(|c| c.id)
                .collect::<Vec<_>>()
        };
        let mut player_deck = in_zone(Zone::PlayerDeck);
        let mut encounter_deck = in_zone(Zone::EncounterDeck);
        player_deck.shuffle(rng);
        encounter_deck.shuffle(rng);
        let threat_level = setup
            .scenario
            .heroes
            .iter()
            .map(|id| setup.db.get(id).map_or(0, |d| d.threat_cost as i32))
            .sum();
        let mut state = GameState {
            setup: Arc::clone(setup),
            round: 1,
            stage: StageId::GainResourcesAndDraw,
            threat_level,
            quest_index: 0,
            quest_progress: 0,
            cards,
            player_deck,
            encounter_deck,
            outcome: None,
        };
        for _ in 0..STARTING_HAND {
            state.draw_card();
        }
        state
    }

    pub fn setup(&self) -> &Arc<GameSetup> {
        &self.setup
    }

    pub fn db(&self) -> &CardDb {
        &self.setup.db
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn stage(&self) -> StageId {
        self.stage
    }

    pub fn threat_level(&self) -> i32 {
        self.threat_level
    }

    pub fn threat_limit(&self) -> i32 {
        self.setup.threat_limit()
    }

    /// Index of the current quest card; 3 once the scenario is won.
    pub fn quest_index(&self) -> u8 {
        self.quest_index
    }

    pub fn quest_progress(&self) -> i32 {
        self.quest_progress
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn is_over(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn cards(&self) -> &[CardInstance] {
        &self.cards
    }

    pub fn card(&self, id: InstanceId) -> &CardInstance {
        &self.cards[id.index()]
    }

    pub fn def_of(&self, id: InstanceId) -> &CardDef {
        self.setup.db.def(self.cards[id.index()].def)
    }

    /// Instances in `zone`, by ascending id.
    pub fn in_zone(&self, zone: Zone) -> impl Iterator<Item = &CardInstance> + '_ {
        self.cards.iter().filter(move |c| c.zone == zone)
    }

    pub fn first_in(&self, zone: Zone) -> Option<InstanceId> {
        self.in_zone(zone).next().map(|c| c.id)
    }

    /// Surviving hero with the lowest instance id.
    pub fn first_hero(&self) -> Option<InstanceId> {
        self.heroes_alive().next().map(|c| c.id)
    }

    pub fn ids_in(&self, zone: Zone) -> Vec<InstanceId> {
        self.in_zone(zone).map(|c| c.id).collect()
    }

    /// Player deck order, top card last.
    pub fn player_deck_order(&self) -> &[InstanceId] {
        &self.player_deck
    }

    pub fn encounter_deck_order(&self) -> &[InstanceId] {
        &self.encounter_deck
    }

    pub fn current_quest(&self) -> Option<&CardDef> {
        let id = self
            .setup
            .scenario
            .quest_line
            .get(self.quest_index as usize)?;
        self.setup.db.get(id)
    }

    /// Quest points banked so far: completed quest cards plus current progress.
    pub fn total_progress(&self) -> i32 {
        self.in_zone(Zone::CompletedQuests)
            .map(|c| self.setup.db.def(c.def).quest_points as i32)
            .sum::<i32>()
            + self.quest_progress
    }

    pub fn kind_of(&self, id: InstanceId) -> CardKind {
        self.def_of(id).kind
    }

    pub fn heroes_alive(&self) -> impl Iterator<Item = &CardInstance> + '_ {
        self.in_zone(Zone::PlayArea)
            .filter(|c| self.setup.db.def(c.def).kind == CardKind::Hero)
    }

    /// Heroes and allies in play.
    pub fn characters(&self) -> impl Iterator<Item = &CardInstance> + '_ {
        self.in_zone(Zone::PlayArea)
            .filter(|c| self.setup.db.def(c.def).kind.is_character())
    }

    /// Characters in play that are neither exhausted nor committed.
    pub fn ready_characters(&self) -> Vec<InstanceId> {
        self.characters()
            .filter(|c| !c.exhausted && !c.committed)
            .map(|c| c.id)
            .collect()
    }

    pub fn engaged_enemies(&self) -> Vec<InstanceId> {
        self.ids_in(Zone::EngagementArea)
    }

    fn buff_count(&self, id: InstanceId, stat: StatBuff) -> u32 {
        self.in_zone(Zone::PlayArea)
            .filter(|c| c.attached_to == Some(id))
            .filter(|c| self.setup.db.def(c.def).buff == Some(stat))
            .count() as u32
    }

    /// Willpower including attached items.
    pub fn willpower(&self, id: InstanceId) -> u32 {
        self.def_of(id).willpower + self.buff_count(id, StatBuff::Willpower)
    }

    pub fn attack(&self, id: InstanceId) -> u32 {
        self.def_of(id).attack + self.buff_count(id, StatBuff::Attack)
    }

    pub fn defense(&self, id: InstanceId) -> u32 {
        self.def_of(id).defense + self.buff_count(id, StatBuff::Defense)
    }

    /// Printed attack of an enemy, before any shadow card.
    pub fn attack_of_enemy(&self, id: InstanceId) -> u32 {
        self.def_of(id).attack
    }

    pub fn remaining_hit_points(&self, id: InstanceId) -> u32 {
        self.def_of(id)
            .hit_points
            .saturating_sub(self.card(id).damage)
    }

    /// Summed threat of enemies and locations in the staging area.
    pub fn staging_threat(&self) -> i32 {
        self.in_zone(Zone::StagingArea)
            .map(|c| self.setup.db.def(c.def).threat as i32)
            .sum()
    }

    /// Resources available to pay for cards of `sphere`: pools of living
    /// heroes of that sphere, or of any hero for neutral cards.
    pub fn resources_for(&self, sphere: Sphere) -> u32 {
        self.heroes_alive()
            .filter(|h| sphere == Sphere::Neutral || self.setup.db.def(h.def).sphere == sphere)
            .map(|h| h.resource_pool)
            .sum()
    }

    pub fn total_resources(&self) -> u32 {
        self.resources_for(Sphere::Neutral)
    }

    // Fixture helpers. These bypass the stage pipeline and exist to build
    // positions for tests and tools; they keep zone bookkeeping consistent.

    pub fn set_stage(&mut self, stage: StageId) {
        self.stage = stage;
    }

    pub fn set_threat_level(&mut self, threat: i32) {
        self.threat_level = threat;
    }

    pub fn set_quest_progress(&mut self, progress: i32) {
        self.quest_progress = progress;
    }

    pub fn set_outcome(&mut self, outcome: Option<Outcome>) {
        self.outcome = outcome;
    }

    pub fn card_mut(&mut self, id: InstanceId) -> &mut CardInstance {
        &mut self.cards[id.index()]
    }

    /// Moves a card to `zone` (onto the top if it is a deck).
    pub fn move_card(&mut self, id: InstanceId, zone: Zone) {
        match self.cards[id.index()].zone {
            Zone::PlayerDeck => self.player_deck.retain(|&x| x != id),
            Zone::EncounterDeck => self.encounter_deck.retain(|&x| x != id),
            _ => {}
        }
        match zone {
            Zone::PlayerDeck => self.player_deck.push(id),
            Zone::EncounterDeck => self.encounter_deck.push(id),
            _ => {}
        }
        self.cards[id.index()].zone = zone;
    }

    /// First instance of definition `card` found in `zone`.
    pub fn find(&self, card: &str, zone: Zone) -> Option<InstanceId> {
        let def = self.setup.db.index_of(card)?;
        self.in_zone(zone).find(|c| c.def == def).map(|c| c.id)
    }

    pub(super) fn draw_card(&mut self) -> bool {
        match self.player_deck.pop() {
            Some(id) => {
                self.cards[id.index()].zone = Zone::Hand;
                true
            }
            None => false,
        }
    }

    /// Re-randomizes everything the player cannot see: the order of both
    /// decks and which encounter cards are lying face down as shadows.
    pub fn determinize(&mut self, rng: &mut GameRng) {
        self.player_deck.shuffle(rng);
        let shadowed: Vec<InstanceId> = self
            .cards
            .iter()
            .filter(|c| c.shadow_card.is_some())
            .map(|c| c.id)
            .collect();
        let mut pool = std::mem::take(&mut self.encounter_deck);
        pool.extend(
            shadowed
                .iter()
                .filter_map(|&e| self.cards[e.index()].shadow_card),
        );
        pool.shuffle(rng);
        for &enemy in &shadowed {
            let shadow = pool.pop().expect("pool holds at least one card per shadow");
            self.cards[shadow.index()].zone = Zone::Shadow;
            self.cards[enemy.index()].shadow_card = Some(shadow);
        }
        for &id in &pool {
            self.cards[id.index()].zone = Zone::EncounterDeck;
        }
        self.encounter_deck = pool;
    }

    /// Checks the bookkeeping invariants. Returns a description of the first
    /// violation found.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.cards.len() != self.setup.layout.len() {
            return Err("instance count changed".into());
        }
        for (i, c) in self.cards.iter().enumerate() {
            if c.id.index() != i {
                return Err(format!("instance {i} carries id {}", c.id));
            }
        }
        for (deck, zone) in [
            (&self.player_deck, Zone::PlayerDeck),
            (&self.encounter_deck, Zone::EncounterDeck),
        ] {
            let mut listed: Vec<_> = deck.clone();
            listed.sort_unstable();
            let before = listed.len();
            listed.dedup();
            if listed.len() != before {
                return Err(format!("{zone:?} order lists a card twice"));
            }
            if listed != self.ids_in(zone) {
                return Err(format!("{zone:?} order disagrees with card zones"));
            }
        }
        let limit = self.threat_limit();
        if self.outcome.is_none() && self.threat_level >= limit {
            return Err(format!(
                "threat {} at limit {limit} without outcome",
                self.threat_level
            ));
        }
        if self.outcome.is_none() {
            if let Some(q) = self.current_quest() {
                if self.quest_progress >= q.quest_points as i32 {
                    return Err("quest progress not rolled over".into());
                }
            }
        }
        for c in &self.cards {
            let def = self.setup.db.def(c.def);
            if matches!(def.kind, CardKind::Hero | CardKind::Ally | CardKind::Enemy)
                && matches!(
                    c.zone,
                    Zone::PlayArea | Zone::EngagementArea | Zone::StagingArea
                )
                && c.damage >= def.hit_points
            {
                return Err(format!("{} survives with lethal damage", c.id));
            }
            if c.resource_pool > 0 && def.kind != CardKind::Hero {
                return Err(format!("{} holds resources but is not a hero", c.id));
            }
            if c.committed && !(c.zone == Zone::PlayArea && def.kind.is_character()) {
                return Err(format!("{} is committed outside play", c.id));
            }
            if let Some(s) = c.shadow_card {
                if self.cards[s.index()].zone != Zone::Shadow || c.zone != Zone::EngagementArea {
                    return Err(format!("{} has a misplaced shadow card", c.id));
                }
            }
        }
        let shadows = self.in_zone(Zone::Shadow).count();
        let dealt = self
            .cards
            .iter()
            .filter(|c| c.shadow_card.is_some())
            .count();
        if shadows != dealt {
            return Err("orphan shadow card".into());
        }
        Ok(())
    }
}
