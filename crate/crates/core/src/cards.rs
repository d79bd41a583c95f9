//! Card database and scenario files.
//!
//! Both formats are TOML. A card database is a list of `[[card]]` tables;
//! which stat keys a card carries is fixed by its `kind`, and a card that
//! omits a required stat or carries one that does not apply to its kind is
//! rejected. Nothing is defaulted. See `docs/data-format.md` for the schema.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("card `{card}`, field `{field}`: {reason}")]
    Card {
        card: String,
        field: String,
        reason: String,
    },
    #[error("duplicate card id `{0}`")]
    DuplicateId(String),
    #[error("scenario `{scenario}`, field `{field}`: {reason}")]
    Scenario {
        scenario: String,
        field: String,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CardKind {
    Hero,
    Ally,
    Enemy,
    Location,
    EventPlayer,
    EventEncounter,
    Item,
    Quest,
}

impl CardKind {
    const ALL: [CardKind; 8] = [
        CardKind::Hero,
        CardKind::Ally,
        CardKind::Enemy,
        CardKind::Location,
        CardKind::EventPlayer,
        CardKind::EventEncounter,
        CardKind::Item,
        CardKind::Quest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CardKind::Hero => "hero",
            CardKind::Ally => "ally",
            CardKind::Enemy => "enemy",
            CardKind::Location => "location",
            CardKind::EventPlayer => "event-player",
            CardKind::EventEncounter => "event-encounter",
            CardKind::Item => "item",
            CardKind::Quest => "quest",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn is_character(self) -> bool {
        matches!(self, CardKind::Hero | CardKind::Ally)
    }

    /// Cards that live in the player deck.
    pub fn is_player_card(self) -> bool {
        matches!(
            self,
            CardKind::Ally | CardKind::EventPlayer | CardKind::Item
        )
    }

    pub fn is_encounter_card(self) -> bool {
        matches!(
            self,
            CardKind::Enemy | CardKind::Location | CardKind::EventEncounter
        )
    }

    /// Keys a card of this kind must carry, and may not carry anything else
    /// besides `id`, `name`, `kind`.
    fn required_keys(self) -> &'static [&'static str] {
        match self {
            CardKind::Hero => &[
                "sphere",
                "threat_cost",
                "willpower",
                "attack",
                "defense",
                "hit_points",
            ],
            CardKind::Ally => &[
                "sphere",
                "cost",
                "willpower",
                "attack",
                "defense",
                "hit_points",
            ],
            CardKind::Item => &["sphere", "cost", "buff"],
            CardKind::EventPlayer => &["sphere", "cost", "willpower"],
            CardKind::Enemy => &[
                "engagement_cost",
                "threat",
                "attack",
                "defense",
                "hit_points",
                "shadow_attack_bonus",
            ],
            CardKind::Location => &["threat", "quest_points", "shadow_attack_bonus"],
            CardKind::EventEncounter => &["effect", "shadow_attack_bonus"],
            CardKind::Quest => &["quest_points"],
        }
    }
}

impl fmt::Display for CardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sphere {
    Spirit,
    Leadership,
    Tactics,
    Lore,
    Neutral,
    None,
}

impl Sphere {
    pub fn as_str(self) -> &'static str {
        match self {
            Sphere::Spirit => "spirit",
            Sphere::Leadership => "leadership",
            Sphere::Tactics => "tactics",
            Sphere::Lore => "lore",
            Sphere::Neutral => "neutral",
            Sphere::None => "none",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Sphere::Spirit,
            Sphere::Leadership,
            Sphere::Tactics,
            Sphere::Lore,
            Sphere::Neutral,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

/// The character stat an attached item raises by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatBuff {
    Willpower,
    Attack,
    Defense,
}

impl StatBuff {
    pub fn as_str(self) -> &'static str {
        match self {
            StatBuff::Willpower => "willpower",
            StatBuff::Attack => "attack",
            StatBuff::Defense => "defense",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [StatBuff::Willpower, StatBuff::Attack, StatBuff::Defense]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

/// What a revealed encounter event does before it is discarded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncounterEffect {
    /// +1 to the player's threat level.
    RaiseThreat,
    /// 1 damage to every committed character.
    DamageCommitted,
}

impl EncounterEffect {
    pub fn as_str(self) -> &'static str {
        match self {
            EncounterEffect::RaiseThreat => "raise-threat",
            EncounterEffect::DamageCommitted => "damage-committed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            EncounterEffect::RaiseThreat,
            EncounterEffect::DamageCommitted,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

/// Immutable statistics of one card. Stats that do not apply to the kind are 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardDef {
    pub id: String,
    pub name: String,
    pub kind: CardKind,
    pub sphere: Sphere,
    pub cost: u32,
    pub willpower: u32,
    pub attack: u32,
    pub defense: u32,
    pub hit_points: u32,
    pub threat: u32,
    pub threat_cost: u32,
    pub engagement_cost: u32,
    pub quest_points: u32,
    pub shadow_attack_bonus: u32,
    pub buff: Option<StatBuff>,
    pub effect: Option<EncounterEffect>,
}

/// Index of a definition inside its [`CardDb`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefIndex(pub u16);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CardDb {
    cards: Vec<CardDef>,
    by_id: HashMap<String, DefIndex>,
}

impl CardDb {
    pub fn from_defs(defs: Vec<CardDef>) -> Result<Self, DataError> {
        let mut by_id = HashMap::with_capacity(defs.len());
        for (i, def) in defs.iter().enumerate() {
            validate_def(def)?;
            let idx = u16::try_from(i).map_err(|_| DataError::Card {
                card: def.id.clone(),
                field: "id".into(),
                reason: "too many cards in one database".into(),
            })?;
            if by_id.insert(def.id.clone(), DefIndex(idx)).is_some() {
                return Err(DataError::DuplicateId(def.id.clone()));
            }
        }
        Ok(Self { cards: defs, by_id })
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self, DataError> {
        let root: toml::Table = toml::from_str(text).map_err(|e| DataError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        for key in root.keys() {
            if key != "card" {
                return Err(DataError::Parse {
                    path: origin.to_path_buf(),
                    message: format!("unexpected top-level key `{key}`"),
                });
            }
        }
        let entries = match root.get("card") {
            None => return Ok(Self::default()),
            Some(toml::Value::Array(items)) => items,
            Some(_) => {
                return Err(DataError::Parse {
                    path: origin.to_path_buf(),
                    message: "`card` must be an array of tables".into(),
                })
            }
        };
        let defs = entries
            .iter()
            .enumerate()
            .map(|(i, v)| parse_card(i, v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_defs(defs)
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CardDef> {
        self.by_id.get(id).map(|&i| self.def(i))
    }

    pub fn index_of(&self, id: &str) -> Option<DefIndex> {
        self.by_id.get(id).copied()
    }

    pub fn def(&self, idx: DefIndex) -> &CardDef {
        &self.cards[idx.0 as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CardDef> {
        self.cards.iter()
    }

    /// Canonical TOML form: one `[[card]]` table per card in database order,
    /// carrying exactly the keys its kind requires.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        for def in &self.cards {
            out.push_str("[[card]]\n");
            out.push_str(&format!("id = {}\n", toml_str(&def.id)));
            out.push_str(&format!("name = {}\n", toml_str(&def.name)));
            out.push_str(&format!("kind = \"{}\"\n", def.kind));
            for key in def.kind.required_keys() {
                let value = match *key {
                    "sphere" => toml_str(def.sphere.as_str()),
                    "buff" => toml_str(def.buff.map_or("", StatBuff::as_str)),
                    "effect" => toml_str(def.effect.map_or("", EncounterEffect::as_str)),
                    stat => stat_value(def, stat).to_string(),
                };
                out.push_str(&format!("{key} = {value}\n"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_card_db(path: impl AsRef<Path>) -> Result<CardDb, DataError> {
    let path = path.as_ref();
    let text = read(path)?;
    CardDb::parse(&text, path)
}

fn read(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_owned()).to_string()
}

fn stat_value(def: &CardDef, key: &str) -> u32 {
    match key {
        "cost" => def.cost,
        "willpower" => def.willpower,
        "attack" => def.attack,
        "defense" => def.defense,
        "hit_points" => def.hit_points,
        "threat" => def.threat,
        "threat_cost" => def.threat_cost,
        "engagement_cost" => def.engagement_cost,
        "quest_points" => def.quest_points,
        "shadow_attack_bonus" => def.shadow_attack_bonus,
        _ => unreachable!("not a numeric stat: {key}"),
    }
}

const STAT_KEYS: [&str; 10] = [
    "cost",
    "willpower",
    "attack",
    "defense",
    "hit_points",
    "threat",
    "threat_cost",
    "engagement_cost",
    "quest_points",
    "shadow_attack_bonus",
];

fn parse_card(index: usize, value: &toml::Value) -> Result<CardDef, DataError> {
    let fail = |card: &str, field: &str, reason: String| DataError::Card {
        card: card.to_owned(),
        field: field.to_owned(),
        reason,
    };
    let table = value
        .as_table()
        .ok_or_else(|| fail(&format!("#{index}"), "card", "expected a table".into()))?;
    let id = match table.get("id") {
        Some(toml::Value::String(s)) if !s.is_empty() => s.clone(),
        Some(_) => {
            return Err(fail(
                &format!("#{index}"),
                "id",
                "must be a non-empty string".into(),
            ))
        }
        None => return Err(fail(&format!("#{index}"), "id", "missing".into())),
    };
    let get_str = |key: &str| -> Result<&str, DataError> {
        match table.get(key) {
            Some(toml::Value::String(s)) => Ok(s.as_str()),
            Some(_) => Err(fail(&id, key, "must be a string".into())),
            None => Err(fail(&id, key, "missing".into())),
        }
    };
    let name = get_str("name")?.to_owned();
    let kind_str = get_str("kind")?;
    let kind = CardKind::parse(kind_str)
        .ok_or_else(|| fail(&id, "kind", format!("unknown kind `{kind_str}`")))?;
    let required = kind.required_keys();
    for key in table.keys() {
        if !matches!(key.as_str(), "id" | "name" | "kind") && !required.contains(&key.as_str()) {
            return Err(fail(&id, key, format!("not applicable to a {kind} card")));
        }
    }

    let mut def = CardDef {
        id: id.clone(),
        name,
        kind,
        sphere: Sphere::None,
        cost: 0,
        willpower: 0,
        attack: 0,
        defense: 0,
        hit_points: 0,
        threat: 0,
        threat_cost: 0,
        engagement_cost: 0,
        quest_points: 0,
        shadow_attack_bonus: 0,
        buff: None,
        effect: None,
    };
    for &key in required {
        match key {
            "sphere" => {
                let s = get_str(key)?;
                def.sphere = Sphere::parse(s)
                    .ok_or_else(|| fail(&id, key, format!("unknown sphere `{s}`")))?;
            }
            "buff" => {
                let s = get_str(key)?;
                def.buff = Some(
                    StatBuff::parse(s)
                        .ok_or_else(|| fail(&id, key, format!("unknown stat `{s}`")))?,
                );
            }
            "effect" => {
                let s = get_str(key)?;
                def.effect = Some(
                    EncounterEffect::parse(s)
                        .ok_or_else(|| fail(&id, key, format!("unknown effect `{s}`")))?,
                );
            }
            stat => {
                let v = match table.get(stat) {
                    Some(toml::Value::Integer(v)) => *v,
                    Some(_) => return Err(fail(&id, stat, "must be an integer".into())),
                    None => return Err(fail(&id, stat, "missing".into())),
                };
                let v = u32::try_from(v).map_err(|_| {
                    fail(
                        &id,
                        stat,
                        format!("must be a non-negative integer, got {v}"),
                    )
                })?;
                set_stat(&mut def, stat, v);
            }
        }
    }
    Ok(def)
}

fn set_stat(def: &mut CardDef, key: &str, v: u32) {
    let slot = match key {
        "cost" => &mut def.cost,
        "willpower" => &mut def.willpower,
        "attack" => &mut def.attack,
        "defense" => &mut def.defense,
        "hit_points" => &mut def.hit_points,
        "threat" => &mut def.threat,
        "threat_cost" => &mut def.threat_cost,
        "engagement_cost" => &mut def.engagement_cost,
        "quest_points" => &mut def.quest_points,
        "shadow_attack_bonus" => &mut def.shadow_attack_bonus,
        _ => unreachable!("not a numeric stat: {key}"),
    };
    *slot = v;
}

fn validate_def(def: &CardDef) -> Result<(), DataError> {
    let fail = |field: &str, reason: &str| {
        Err(DataError::Card {
            card: def.id.clone(),
            field: field.into(),
            reason: reason.into(),
        })
    };
    if def.id.is_empty() {
        return fail("id", "must be a non-empty string");
    }
    let required = def.kind.required_keys();
    for key in STAT_KEYS {
        if !required.contains(&key) && stat_value(def, key) != 0 {
            return fail(key, "not applicable to this kind");
        }
    }
    if required.contains(&"sphere") == (def.sphere == Sphere::None) {
        return fail("sphere", "sphere must be set exactly for player-side cards");
    }
    if required.contains(&"buff") != def.buff.is_some() {
        return fail("buff", "only items carry a buff");
    }
    if required.contains(&"effect") != def.effect.is_some() {
        return fail("effect", "only encounter events carry an effect");
    }
    match def.kind {
        CardKind::Hero | CardKind::Ally | CardKind::Enemy if def.hit_points == 0 => {
            fail("hit_points", "must be at least 1")
        }
        CardKind::Hero if def.threat_cost == 0 => fail("threat_cost", "must be at least 1"),
        CardKind::Quest | CardKind::Location if def.quest_points == 0 => {
            fail("quest_points", "must be at least 1")
        }
        _ => Ok(()),
    }
}

/// A playable scenario: quest line, starting heroes and decks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub quest_line: Vec<String>,
    pub heroes: Vec<String>,
    /// Card id → copies. Ordered by id, which fixes pre-shuffle instance order.
    pub player_deck: BTreeMap<String, u32>,
    pub encounter_decks: BTreeMap<String, BTreeMap<String, u32>>,
    pub threat_limit: u32,
}

pub const QUEST_CARDS: usize = 3;
pub const STARTING_HEROES: usize = 3;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    quest_line: Vec<String>,
    heroes: Vec<String>,
    threat_limit: u32,
    player_deck: BTreeMap<String, u32>,
    encounter_decks: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Scenario {
    pub fn parse(text: &str, origin: &Path, db: &CardDb) -> Result<Self, DataError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| DataError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let scenario = Scenario {
            name: raw.name,
            quest_line: raw.quest_line,
            heroes: raw.heroes,
            player_deck: raw.player_deck,
            encounter_decks: raw.encounter_decks,
            threat_limit: raw.threat_limit,
        };
        scenario.validate(db)?;
        Ok(scenario)
    }

    pub fn validate(&self, db: &CardDb) -> Result<(), DataError> {
        let fail = |field: &str, reason: String| {
            Err(DataError::Scenario {
                scenario: self.name.clone(),
                field: field.into(),
                reason,
            })
        };
        let check = |field: &str, id: &str, kinds: &[CardKind]| -> Result<(), DataError> {
            match db.get(id) {
                None => fail(field, format!("unresolved card id `{id}`")),
                Some(def) if !kinds.contains(&def.kind) => {
                    fail(field, format!("card `{id}` is a {} card", def.kind))
                }
                Some(_) => Ok(()),
            }
        };
        if self.quest_line.len() != QUEST_CARDS {
            return fail(
                "quest_line",
                format!(
                    "expected {QUEST_CARDS} quest cards, got {}",
                    self.quest_line.len()
                ),
            );
        }
        for id in &self.quest_line {
            check("quest_line", id, &[CardKind::Quest])?;
        }
        if self.heroes.len() != STARTING_HEROES {
            return fail(
                "heroes",
                format!(
                    "expected {STARTING_HEROES} heroes, got {}",
                    self.heroes.len()
                ),
            );
        }
        for id in &self.heroes {
            check("heroes", id, &[CardKind::Hero])?;
        }
        if self.threat_limit == 0 {
            return fail("threat_limit", "must be at least 1".into());
        }
        for (id, &n) in &self.player_deck {
            check(
                "player_deck",
                id,
                &[CardKind::Ally, CardKind::EventPlayer, CardKind::Item],
            )?;
            if n == 0 {
                return fail("player_deck", format!("`{id}` has zero copies"));
            }
        }
        if self.encounter_decks.is_empty() {
            return fail("encounter_decks", "no difficulty defined".into());
        }
        for (difficulty, deck) in &self.encounter_decks {
            let field = format!("encounter_decks.{difficulty}");
            if deck.values().sum::<u32>() == 0 {
                return fail(&field, "encounter deck is empty".into());
            }
            for (id, &n) in deck {
                check(
                    &field,
                    id,
                    &[
                        CardKind::Enemy,
                        CardKind::Location,
                        CardKind::EventEncounter,
                    ],
                )?;
                if n == 0 {
                    return fail(&field, format!("`{id}` has zero copies"));
                }
            }
        }
        Ok(())
    }

    pub fn difficulties(&self) -> impl Iterator<Item = &str> {
        self.encounter_decks.keys().map(String::as_str)
    }

    pub fn to_toml_string(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            name: &'a str,
            quest_line: &'a [String],
            heroes: &'a [String],
            threat_limit: u32,
            player_deck: &'a BTreeMap<String, u32>,
            encounter_decks: &'a BTreeMap<String, BTreeMap<String, u32>>,
        }
        toml::to_string(&Out {
            name: &self.name,
            quest_line: &self.quest_line,
            heroes: &self.heroes,
            threat_limit: self.threat_limit,
            player_deck: &self.player_deck,
            encounter_decks: &self.encounter_decks,
        })
        .expect("scenario serializes")
    }
}

pub fn load_scenario(path: impl AsRef<Path>, db: &CardDb) -> Result<Scenario, DataError> {
    let path = path.as_ref();
    let text = read(path)?;
    Scenario::parse(&text, path, db)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CardDb, DataError> {
        CardDb::parse(text, Path::new("test.toml"))
    }

    const GANDALF: &str = r#"
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
"#;

    #[test]
    fn loads_ally() {
        let db = parse(GANDALF).unwrap();
        let g = db.get("gandalf").unwrap();
        assert_eq!(g.cost, 4);
        assert_eq!(g.kind, CardKind::Ally);
        assert_eq!(g.sphere, Sphere::Neutral);
    }

    #[test]
    fn empty_file_is_empty_db() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn missing_stat_names_card_and_field() {
        let text = GANDALF.replace("hit_points = 4\n", "");
        match parse(&text) {
            Err(DataError::Card { card, field, .. }) => {
                assert_eq!(card, "gandalf");
                assert_eq!(field, "hit_points");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn inapplicable_stat_rejected() {
        let text = format!("{GANDALF}threat = 2\n");
        let err = parse(&text).unwrap_err();
        assert!(err.to_string().contains("threat"), "{err}");
    }

    #[test]
    fn negative_stat_rejected() {
        let text = GANDALF.replace("cost = 4", "cost = -1");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, DataError::Card { ref field, .. } if field == "cost"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = format!("{GANDALF}{GANDALF}");
        assert!(matches!(parse(&text), Err(DataError::DuplicateId(id)) if id == "gandalf"));
    }

    #[test]
    fn zero_quest_points_rejected() {
        let text = "[[card]]\nid = \"q\"\nname = \"Q\"\nkind = \"quest\"\nquest_points = 0\n";
        assert!(
            matches!(parse(text), Err(DataError::Card { ref field, .. }) if field == "quest_points")
        );
    }

    #[test]
    fn hero_needs_threat_cost() {
        let text = "[[card]]\nid = \"h\"\nname = \"H\"\nkind = \"hero\"\nsphere = \"spirit\"\n\
                    threat_cost = 0\nwillpower = 1\nattack = 1\ndefense = 1\nhit_points = 3\n";
        assert!(
            matches!(parse(text), Err(DataError::Card { ref field, .. }) if field == "threat_cost")
        );
    }

    #[test]
    fn malformed_toml_is_parse_error() {
        assert!(matches!(
            parse("[[card]\nid="),
            Err(DataError::Parse { .. })
        ));
    }

    #[test]
    fn serialization_reloads_identically() {
        let db = parse(GANDALF).unwrap();
        let text = db.to_toml_string();
        assert_eq!(parse(&text).unwrap(), db);
    }
}
