//! Stage transitions.

use rand::seq::SliceRandom;

use super::{Action, GameError, GameRng, GameState, InstanceId, Outcome, StageId, StageKind, Zone};
use crate::cards::{CardKind, EncounterEffect, Sphere};

/// What a random stage did, for tracing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomEvent {
    /// Staging revealed this card, or nothing when both encounter piles were empty.
    Revealed(Option<InstanceId>),
    ShadowsDealt(u32),
}

impl GameState {
    fn expect_kind(&self, op: &'static str, kind: StageKind) -> Result<(), GameError> {
        if let Some(o) = self.outcome {
            return Err(GameError::GameOver(o));
        }
        if self.stage.kind() != kind {
            return Err(GameError::WrongStage {
                op,
                stage: self.stage,
                kind: self.stage.kind(),
            });
        }
        Ok(())
    }

    fn finish_stage(&mut self) {
        if self.outcome.is_none() {
            if self.stage == StageId::Refresh {
                self.round += 1;
            }
            self.stage = self.stage.next();
        }
    }

    fn raise_threat(&mut self, amount: i32) {
        self.threat_level += amount;
        if self.threat_level >= self.threat_limit() && self.outcome.is_none() {
            self.outcome = Some(Outcome::LossThreat);
        }
    }

    /// Realizes a decision in place and advances to the next stage.
    pub fn apply(&mut self, action: &Action) -> Result<(), GameError> {
        self.validate(action)?;
        match action {
            Action::PlayCards(ids) => self.play_cards(ids),
            Action::Commit(ids) => {
                for &id in ids {
                    let c = &mut self.cards[id.index()];
                    c.committed = true;
                    c.exhausted = true;
                }
            }
            Action::TravelTo(Some(id)) => self.move_card(*id, Zone::ActiveLocation),
            Action::TravelTo(None) => {}
            Action::Defend(pairs) => {
                for &(enemy, defender) in pairs {
                    self.cards[enemy.index()].defended_by = defender;
                    if let Some(d) = defender {
                        self.cards[d.index()].exhausted = true;
                    }
                }
            }
            Action::Attack(groups) => {
                for (enemy, attackers) in groups {
                    for &a in attackers {
                        let c = &mut self.cards[a.index()];
                        c.attacking = Some(*enemy);
                        c.exhausted = true;
                    }
                }
            }
        }
        self.finish_stage();
        Ok(())
    }

    fn play_cards(&mut self, ids: &[InstanceId]) {
        let heroes: Vec<InstanceId> = self.heroes_alive().map(|h| h.id).collect();
        let (neutral, sphered): (Vec<InstanceId>, Vec<InstanceId>) = ids
            .iter()
            .partition(|&&id| self.def_of(id).sphere == Sphere::Neutral);
        for id in sphered.into_iter().chain(neutral) {
            let def = self.def_of(id);
            let (sphere, mut due) = (def.sphere, def.cost);
            for &h in &heroes {
                if due == 0 {
                    break;
                }
                if sphere != Sphere::Neutral && self.def_of(h).sphere != sphere {
                    continue;
                }
                let pool = &mut self.cards[h.index()].resource_pool;
                let paid = due.min(*pool);
                *pool -= paid;
                due -= paid;
            }
            debug_assert_eq!(due, 0, "validated purchase left {due} unpaid");
            self.move_card(id, Zone::PlayArea);
            if self.def_of(id).kind == CardKind::Item {
                self.cards[id.index()].attached_to = heroes.first().copied();
            }
        }
    }

    /// Resolves the current ruled stage in place.
    pub fn advance_ruled(&mut self) -> Result<(), GameError> {
        self.expect_kind("advance_ruled_stage", StageKind::Ruled)?;
        match self.stage {
            StageId::GainResourcesAndDraw => {
                let heroes: Vec<InstanceId> = self.heroes_alive().map(|h| h.id).collect();
                for h in heroes {
                    self.cards[h.index()].resource_pool += 1;
                }
                if !self.draw_card() {
                    self.outcome = Some(Outcome::LossDeckEmpty);
                }
            }
            StageId::QuestResolution => self.resolve_quest(),
            StageId::EngagementChecks => {
                let engaging: Vec<InstanceId> = self
                    .in_zone(Zone::StagingArea)
                    .filter(|c| {
                        let d = self.db().def(c.def);
                        d.kind == CardKind::Enemy && d.engagement_cost as i32 <= self.threat_level
                    })
                    .map(|c| c.id)
                    .collect();
                for e in engaging {
                    self.move_card(e, Zone::EngagementArea);
                }
            }
            StageId::ResolveEnemyAttacks => self.resolve_enemy_attacks(),
            StageId::ResolvePlayerAttacks => self.resolve_player_attacks(),
            StageId::Refresh => self.refresh(),
            _ => unreachable!("non-ruled stage passed the kind check"),
        }
        self.finish_stage();
        Ok(())
    }

    fn resolve_quest(&mut self) {
        let committed: Vec<InstanceId> = self
            .characters()
            .filter(|c| c.committed)
            .map(|c| c.id)
            .collect();
        let boost: u32 = self
            .in_zone(Zone::PlayArea)
            .filter(|c| self.db().def(c.def).kind == CardKind::EventPlayer)
            .map(|c| self.db().def(c.def).willpower)
            .sum();
        let willpower = committed.iter().map(|&id| self.willpower(id)).sum::<u32>() + boost;
        let willpower = willpower as i32;
        let threat = self.staging_threat();
        if willpower > threat {
            self.add_progress(willpower - threat);
        } else if willpower < threat {
            self.raise_threat(threat - willpower);
        }
    }

    /// Places progress on the active location first, then on the quest,
    /// rolling completed quest cards forward.
    fn add_progress(&mut self, mut amount: i32) {
        if let Some(loc) = self.first_in(Zone::ActiveLocation) {
            let needed = self.def_of(loc).quest_points as i32 - self.card(loc).damage as i32;
            let placed = amount.min(needed);
            self.cards[loc.index()].damage += placed as u32;
            amount -= placed;
            if placed == needed {
                self.cards[loc.index()].damage = 0;
                self.move_card(loc, Zone::EncounterDiscard);
            }
        }
        self.quest_progress += amount;
        while let Some(quest) = self.current_quest() {
            let points = quest.quest_points as i32;
            if self.quest_progress < points {
                break;
            }
            self.quest_progress -= points;
            if let Some(q) = self.first_in(Zone::QuestDeck) {
                self.move_card(q, Zone::CompletedQuests);
            }
            self.quest_index += 1;
        }
        if self.current_quest().is_none() {
            self.outcome = Some(Outcome::Win);
        }
    }

    /// Deals damage; a card reaching its hit points leaves play at once.
    fn deal_damage(&mut self, target: InstanceId, amount: u32) {
        if amount == 0 {
            return;
        }
        let hp = self.def_of(target).hit_points;
        let card = &mut self.cards[target.index()];
        card.damage += amount;
        if card.damage < hp {
            return;
        }
        card.damage = 0;
        card.exhausted = false;
        card.committed = false;
        card.resource_pool = 0;
        card.attacking = None;
        card.defended_by = None;
        match self.kind_of(target) {
            CardKind::Enemy => {
                if let Some(s) = self.cards[target.index()].shadow_card.take() {
                    self.move_card(s, Zone::EncounterDiscard);
                }
                self.move_card(target, Zone::EncounterDiscard);
            }
            _ => {
                let items: Vec<InstanceId> = self
                    .in_zone(Zone::PlayArea)
                    .filter(|c| c.attached_to == Some(target))
                    .map(|c| c.id)
                    .collect();
                for item in items {
                    self.cards[item.index()].attached_to = None;
                    self.move_card(item, Zone::PlayerDiscard);
                }
                self.move_card(target, Zone::PlayerDiscard);
                if self.heroes_alive().next().is_none() && self.outcome.is_none() {
                    self.outcome = Some(Outcome::LossHeroesDead);
                }
            }
        }
    }

    fn resolve_enemy_attacks(&mut self) {
        for enemy in self.engaged_enemies() {
            if self.outcome.is_some() {
                break;
            }
            let shadow_bonus = self
                .card(enemy)
                .shadow_card
                .map_or(0, |s| self.def_of(s).shadow_attack_bonus);
            let strength = self.def_of(enemy).attack + shadow_bonus;
            let defender = self
                .card(enemy)
                .defended_by
                .filter(|&d| self.card(d).zone == Zone::PlayArea);
            match defender {
                Some(d) => {
                    let dmg = strength.saturating_sub(self.defense(d));
                    self.deal_damage(d, dmg);
                }
                None => {
                    if let Some(h) = self.first_hero() {
                        self.deal_damage(h, strength);
                    }
                }
            }
            self.cards[enemy.index()].defended_by = None;
        }
    }

    fn resolve_player_attacks(&mut self) {
        for enemy in self.engaged_enemies() {
            let attack: u32 = self
                .characters()
                .filter(|c| c.attacking == Some(enemy))
                .map(|c| self.attack(c.id))
                .sum();
            let dmg = attack.saturating_sub(self.def_of(enemy).defense);
            self.deal_damage(enemy, dmg);
        }
        for c in &mut self.cards {
            c.attacking = None;
        }
    }

    fn refresh(&mut self) {
        let shadows = self.ids_in(Zone::Shadow);
        for s in shadows {
            self.move_card(s, Zone::EncounterDiscard);
        }
        let events: Vec<InstanceId> = self
            .in_zone(Zone::PlayArea)
            .filter(|c| self.db().def(c.def).kind == CardKind::EventPlayer)
            .map(|c| c.id)
            .collect();
        for e in events {
            self.move_card(e, Zone::PlayerDiscard);
        }
        for c in &mut self.cards {
            c.exhausted = false;
            c.committed = false;
            c.shadow_card = None;
            c.defended_by = None;
            c.attacking = None;
        }
        self.raise_threat(1);
    }

    /// Top encounter card, reshuffling the discard pile into the deck when
    /// the deck runs out.
    fn take_encounter_card(&mut self, rng: &mut GameRng) -> Option<InstanceId> {
        if self.encounter_deck.is_empty() {
            let mut pile = self.ids_in(Zone::EncounterDiscard);
            pile.shuffle(rng);
            for &id in &pile {
                self.cards[id.index()].zone = Zone::EncounterDeck;
            }
            self.encounter_deck = pile;
        }
        let id = self.encounter_deck.pop()?;
        self.cards[id.index()].zone = Zone::EncounterDiscard;
        Some(id)
    }

    /// Resolves the current random stage in place.
    pub fn resolve_random(&mut self, rng: &mut GameRng) -> Result<RandomEvent, GameError> {
        self.expect_kind("resolve_random_stage", StageKind::Random)?;
        let event = match self.stage {
            StageId::Staging => {
                let revealed = self.take_encounter_card(rng);
                if let Some(id) = revealed {
                    let def = self.def_of(id);
                    match def.kind {
                        CardKind::Enemy | CardKind::Location => {
                            self.move_card(id, Zone::StagingArea)
                        }
                        _ => match def.effect {
                            Some(EncounterEffect::RaiseThreat) => self.raise_threat(1),
                            Some(EncounterEffect::DamageCommitted) => {
                                let committed: Vec<InstanceId> = self
                                    .characters()
                                    .filter(|c| c.committed)
                                    .map(|c| c.id)
                                    .collect();
                                for c in committed {
                                    self.deal_damage(c, 1);
                                }
                            }
                            None => {}
                        },
                    }
                }
                RandomEvent::Revealed(revealed)
            }
            StageId::DealShadowCards => {
                let mut dealt = 0;
                for enemy in self.engaged_enemies() {
                    let Some(s) = self.take_encounter_card(rng) else {
                        break;
                    };
                    self.cards[s.index()].zone = Zone::Shadow;
                    self.cards[enemy.index()].shadow_card = Some(s);
                    dealt += 1;
                }
                RandomEvent::ShadowsDealt(dealt)
            }
            _ => unreachable!("non-random stage passed the kind check"),
        };
        self.finish_stage();
        Ok(event)
    }

    /// Runs ruled and random stages until a decision stage or the end of the
    /// game.
    pub fn run_until_decision(&mut self, rng: &mut GameRng) {
        while self.outcome.is_none() {
            match self.stage.kind() {
                StageKind::Decision => return,
                StageKind::Ruled => self.advance_ruled().expect("stage kind checked"),
                StageKind::Random => {
                    self.resolve_random(rng).expect("stage kind checked");
                }
            }
        }
    }
}
