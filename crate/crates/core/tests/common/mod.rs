//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use cardquest_core::cards::{load_card_db, load_scenario, CardDb, Scenario};
use cardquest_core::game::{new_game, GameRng, GameSetup, GameState, InstanceId, StageId, Zone};
use rand::SeedableRng;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// The shipped card pool and scenario.
pub fn shipped(difficulty: &str) -> Arc<GameSetup> {
    let db = Arc::new(load_card_db(data_dir().join("cards.toml")).expect("shipped cards load"));
    let scenario = Arc::new(
        load_scenario(data_dir().join("scenarios/mirkwood-passage.toml"), &db)
            .expect("shipped scenario loads"),
    );
    GameSetup::new(db, scenario, difficulty).expect("difficulty exists")
}

/// A small pool with round numbers, independent of the shipped data.
pub const MINI_CARDS: &str = r#"
[[card]]
id = "sage"
name = "Sage"
kind = "hero"
sphere = "spirit"
threat_cost = 9
willpower = 2
attack = 1
defense = 1
hit_points = 4

[[card]]
id = "warrior"
name = "Warrior"
kind = "hero"
sphere = "tactics"
threat_cost = 10
willpower = 2
attack = 2
defense = 3
hit_points = 6

[[card]]
id = "lord"
name = "Lord"
kind = "hero"
sphere = "leadership"
threat_cost = 10
willpower = 1
attack = 3
defense = 2
hit_points = 6

[[card]]
id = "gandalf"
name = "Gandalf"
kind = "ally"
sphere = "neutral"
cost = 4
willpower = 4
attack = 4
defense = 4
hit_points = 4

[[card]]
id = "wandering-took"
name = "Wandering Took"
kind = "ally"
sphere = "spirit"
cost = 2
willpower = 1
attack = 1
defense = 1
hit_points = 2

[[card]]
id = "escort"
name = "Escort"
kind = "ally"
sphere = "spirit"
cost = 2
willpower = 2
attack = 0
defense = 0
hit_points = 1

[[card]]
id = "gondorian-spearman"
name = "Gondorian Spearman"
kind = "ally"
sphere = "tactics"
cost = 2
willpower = 0
attack = 1
defense = 1
hit_points = 1

[[card]]
id = "veteran-axehand"
name = "Veteran Axehand"
kind = "ally"
sphere = "tactics"
cost = 2
willpower = 0
attack = 2
defense = 1
hit_points = 2

[[card]]
id = "guard"
name = "Guard"
kind = "ally"
sphere = "leadership"
cost = 3
willpower = 0
attack = 1
defense = 2
hit_points = 3

[[card]]
id = "plate"
name = "Plate"
kind = "item"
sphere = "leadership"
cost = 1
buff = "defense"

[[card]]
id = "spider"
name = "Spider"
kind = "enemy"
engagement_cost = 20
threat = 2
attack = 2
defense = 1
hit_points = 3
shadow_attack_bonus = 1

[[card]]
id = "orc"
name = "Orc"
kind = "enemy"
engagement_cost = 30
threat = 1
attack = 3
defense = 0
hit_points = 2
shadow_attack_bonus = 0

[[card]]
id = "road"
name = "Road"
kind = "location"
threat = 2
quest_points = 3
shadow_attack_bonus = 0

[[card]]
id = "gate"
name = "Gate"
kind = "location"
threat = 3
quest_points = 2
shadow_attack_bonus = 0

[[card]]
id = "dread"
name = "Dread"
kind = "event-encounter"
effect = "raise-threat"
shadow_attack_bonus = 1

[[card]]
id = "q1"
name = "Quest One"
kind = "quest"
quest_points = 4

[[card]]
id = "q2"
name = "Quest Two"
kind = "quest"
quest_points = 4

[[card]]
id = "q3"
name = "Quest Three"
kind = "quest"
quest_points = 4
"#;

pub const MINI_SCENARIO: &str = r#"
name = "Mini"
quest_line = ["q1", "q2", "q3"]
heroes = ["sage", "warrior", "lord"]
threat_limit = 50

[player_deck]
gandalf = 2
wandering-took = 3
escort = 3
gondorian-spearman = 3
veteran-axehand = 3
guard = 3
plate = 2

[encounter_decks.easy]
spider = 4
orc = 4
road = 3
gate = 3
dread = 2
"#;

pub fn mini() -> Arc<GameSetup> {
    let db = Arc::new(
        CardDb::parse(MINI_CARDS, Path::new("mini-cards.toml")).expect("mini cards parse"),
    );
    let scenario = Arc::new(
        Scenario::parse(MINI_SCENARIO, Path::new("mini-scenario.toml"), &db)
            .expect("mini scenario parses"),
    );
    GameSetup::new(db, scenario, "easy").expect("difficulty exists")
}

pub fn fresh(setup: &Arc<GameSetup>, seed: u64) -> GameState {
    new_game(setup, &mut GameRng::seed_from_u64(seed))
}

/// A fresh game with the hand returned to the deck, at `stage`.
pub fn board(setup: &Arc<GameSetup>, stage: StageId) -> GameState {
    let mut s = fresh(setup, 1);
    for id in s.ids_in(Zone::Hand) {
        s.move_card(id, Zone::PlayerDeck);
    }
    s.set_stage(stage);
    s
}

/// Moves one more copy of `card` out of a deck into `zone`.
pub fn take(s: &mut GameState, card: &str, zone: Zone) -> InstanceId {
    let id = s
        .find(card, Zone::PlayerDeck)
        .or_else(|| s.find(card, Zone::EncounterDeck))
        .unwrap_or_else(|| panic!("no copy of `{card}` left in a deck"));
    s.move_card(id, zone);
    id
}

pub fn hero(s: &GameState, card: &str) -> InstanceId {
    s.find(card, Zone::PlayArea).expect("hero in play")
}
