//! Legal-action generation for the five decision stages, and the matching
//! rule checks used when an action is applied.

use std::collections::HashSet;

use super::{Action, GameError, GameState, InstanceId, StageId, StageKind, Zone};
use crate::cards::{CardKind, Sphere};

/// Above this many distinct payable subsets, Planning offers single-card
/// purchases only (plus the empty purchase).
pub const PLANNING_SUBSET_CAP: usize = 64;
/// Hand sizes above this skip subset enumeration entirely.
const PLANNING_MAX_HAND_BITS: usize = 12;
/// Commit subsets are enumerated over at most this many characters.
const COMMIT_MAX_CHARACTERS: usize = 12;
const DEFEND_CAP: usize = 4096;
const ATTACK_CAP: usize = 512;

const SPHERES: [Sphere; 4] = [
    Sphere::Spirit,
    Sphere::Leadership,
    Sphere::Tactics,
    Sphere::Lore,
];

fn sphere_slot(s: Sphere) -> Option<usize> {
    SPHERES.iter().position(|&x| x == s)
}

/// Resource pools of living heroes grouped by sphere.
#[derive(Clone, Copy, Debug, Default)]
pub(super) struct Pools([u32; 4]);

impl Pools {
    pub(super) fn of(state: &GameState) -> Self {
        let mut pools = [0; 4];
        for h in state.heroes_alive() {
            if let Some(i) = sphere_slot(state.db().def(h.def).sphere) {
                pools[i] += h.resource_pool;
            }
        }
        Pools(pools)
    }

    /// Whether a purchase with the given per-sphere and neutral demand can be
    /// paid: each sphere from its own pool, neutral from whatever remains.
    fn can_pay(&self, demand: &[u32; 4], neutral: u32) -> bool {
        let mut spare = 0;
        for (&need, &have) in demand.iter().zip(&self.0) {
            if need > have {
                return false;
            }
            spare += have - need;
        }
        neutral <= spare
    }
}

fn demand_of(state: &GameState, ids: impl IntoIterator<Item = InstanceId>) -> ([u32; 4], u32) {
    let mut demand = [0; 4];
    let mut neutral = 0;
    for id in ids {
        let def = state.def_of(id);
        match sphere_slot(def.sphere) {
            Some(i) => demand[i] += def.cost,
            None => neutral += def.cost,
        }
    }
    (demand, neutral)
}

pub(super) fn is_payable(state: &GameState, ids: &[InstanceId]) -> bool {
    let (demand, neutral) = demand_of(state, ids.iter().copied());
    Pools::of(state).can_pay(&demand, neutral)
}

/// Non-empty bit masks over `n` items that satisfy `keep`, ordered by
/// popcount then numerically.
fn masks_by_size(n: usize, mut keep: impl FnMut(u32) -> bool) -> Vec<u32> {
    let mut masks = Vec::new();
    let end = 1u32 << n;
    for k in 1..=n as u32 {
        let mut m = (1u32 << k) - 1;
        while m < end {
            if keep(m) {
                masks.push(m);
            }
            // next mask with the same popcount
            let low = m & m.wrapping_neg();
            let ripple = m + low;
            m = (((ripple ^ m) >> 2) / low) | ripple;
        }
    }
    masks
}

/// Depth-first enumeration of payable hand subsets. Payability is monotone,
/// so unaffordable branches are cut.
struct PlanningSearch<'a> {
    /// Per card, the mask of all hand cards sharing its definition.
    groups: &'a [u32],
    costs: &'a [(Option<usize>, u32)],
    pools: Pools,
}

impl PlanningSearch<'_> {
    /// Pushes every payable canonical non-empty mask extending `mask` with
    /// cards from index `i` on. Returns false once the cap is exceeded.
    fn collect(
        &self,
        i: usize,
        mask: u32,
        demand: [u32; 4],
        neutral: u32,
        out: &mut Vec<u32>,
    ) -> bool {
        if i == self.costs.len() {
            if mask != 0 {
                out.push(mask);
            }
            return out.len() < PLANNING_SUBSET_CAP;
        }
        if !self.collect(i + 1, mask, demand, neutral, out) {
            return false;
        }
        // copies of a card are interchangeable: take them in hand order
        let earlier_copies = self.groups[i] & ((1 << i) - 1);
        if mask & earlier_copies != earlier_copies {
            return true;
        }
        let (slot, cost) = self.costs[i];
        let (mut demand, mut neutral) = (demand, neutral);
        match slot {
            Some(s) => demand[s] += cost,
            None => neutral += cost,
        }
        if !self.pools.can_pay(&demand, neutral) {
            return true;
        }
        self.collect(i + 1, mask | 1 << i, demand, neutral, out)
    }
}

fn select(ids: &[InstanceId], mask: u32) -> Vec<InstanceId> {
    ids.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &id)| id)
        .collect()
}

impl GameState {
    /// Whether the living heroes' resources can pay for all of `ids` at once.
    pub fn can_afford(&self, ids: &[InstanceId]) -> bool {
        is_payable(self, ids)
    }

    /// Legal actions in a fixed order: the fullest options come first and
    /// the empty one (no purchase, no commit, nobody defending) last, so
    /// that searches breaking ties by order lean towards acting.
    pub fn legal_actions(&self) -> Result<Vec<Action>, GameError> {
        if let Some(o) = self.outcome {
            return Err(GameError::GameOver(o));
        }
        Ok(match self.stage {
            StageId::Planning => self.planning_actions(),
            StageId::CommitCharacters => self.commit_actions(),
            StageId::Travel => self.travel_actions(),
            StageId::DeclareDefenders => self.defend_actions(),
            StageId::DeclareAttackers => self.attack_actions(),
            stage => {
                return Err(GameError::WrongStage {
                    op: "legal_actions",
                    stage,
                    kind: stage.kind(),
                })
            }
        })
    }

    fn planning_actions(&self) -> Vec<Action> {
        let hand = self.ids_in(Zone::Hand);
        let pools = Pools::of(self);
        let mut out = Vec::new();
        if hand.len() <= PLANNING_MAX_HAND_BITS {
            let groups: Vec<u32> = hand
                .iter()
                .map(|&a| {
                    let def = self.card(a).def;
                    hand.iter()
                        .enumerate()
                        .filter(|(_, &b)| self.card(b).def == def)
                        .fold(0, |acc, (j, _)| acc | 1 << j)
                })
                .collect();
            let costs: Vec<(Option<usize>, u32)> = hand
                .iter()
                .map(|&id| {
                    let def = self.def_of(id);
                    (sphere_slot(def.sphere), def.cost)
                })
                .collect();
            let mut masks = Vec::new();
            let search = PlanningSearch {
                groups: &groups,
                costs: &costs,
                pools,
            };
            if search.collect(0, 0, [0; 4], 0, &mut masks) {
                masks.sort_unstable_by_key(|m| std::cmp::Reverse((m.count_ones(), *m)));
                out.extend(masks.iter().map(|&m| Action::PlayCards(select(&hand, m))));
                out.push(Action::PlayCards(Vec::new()));
                return out;
            }
        }
        let mut seen = HashSet::new();
        for &id in hand.iter().rev() {
            let (demand, neutral) = demand_of(self, [id]);
            if seen.insert(self.card(id).def) && pools.can_pay(&demand, neutral) {
                out.push(Action::PlayCards(vec![id]));
            }
        }
        out.push(Action::PlayCards(Vec::new()));
        out
    }

    /// Characters that may be committed: ready, with non-zero willpower.
    fn commit_candidates(&self) -> Vec<(InstanceId, u32)> {
        self.ready_characters()
            .into_iter()
            .map(|id| (id, self.willpower(id)))
            .filter(|&(_, w)| w > 0)
            .take(COMMIT_MAX_CHARACTERS)
            .collect()
    }

    fn commit_actions(&self) -> Vec<Action> {
        let candidates = self.commit_candidates();
        let threat = self.staging_threat();
        let ids: Vec<InstanceId> = candidates.iter().map(|c| c.0).collect();
        let mut out: Vec<Action> = masks_by_size(candidates.len(), |mask| {
            let w: u32 = (0..candidates.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| candidates[i].1)
                .sum();
            w as i32 > threat
        })
        .into_iter()
        .rev()
        .map(|mask| Action::Commit(select(&ids, mask)))
        .collect();
        out.push(Action::Commit(Vec::new()));
        out
    }

    fn travel_actions(&self) -> Vec<Action> {
        let mut out = vec![Action::TravelTo(None)];
        if self.in_zone(Zone::ActiveLocation).next().is_none() {
            out.extend(
                self.in_zone(Zone::StagingArea)
                    .filter(|c| self.db().def(c.def).kind == CardKind::Location)
                    .map(|c| Action::TravelTo(Some(c.id))),
            );
        }
        out
    }

    fn defend_actions(&self) -> Vec<Action> {
        let enemies = self.engaged_enemies();
        let ready = self.ready_characters();
        let mut out = Vec::new();
        let mut current: Vec<(InstanceId, Option<InstanceId>)> = Vec::with_capacity(enemies.len());
        let mut used = vec![false; ready.len()];
        fn recurse(
            enemies: &[InstanceId],
            ready: &[InstanceId],
            used: &mut [bool],
            current: &mut Vec<(InstanceId, Option<InstanceId>)>,
            out: &mut Vec<Action>,
        ) {
            if out.len() >= DEFEND_CAP {
                return;
            }
            let Some((&enemy, rest)) = enemies.split_first() else {
                out.push(Action::Defend(current.clone()));
                return;
            };
            for i in (0..ready.len()).rev() {
                if !used[i] {
                    used[i] = true;
                    current.push((enemy, Some(ready[i])));
                    recurse(rest, ready, used, current, out);
                    current.pop();
                    used[i] = false;
                }
            }
            current.push((enemy, None));
            recurse(rest, ready, used, current, out);
            current.pop();
        }
        recurse(&enemies, &ready, &mut used, &mut current, &mut out);
        out
    }

    fn attack_actions(&self) -> Vec<Action> {
        let enemies = self.engaged_enemies();
        let ready = self.ready_characters();
        let empty = Action::Attack(Vec::new());
        if enemies.is_empty() || ready.is_empty() {
            return vec![empty];
        }
        let radix = enemies.len() + 1;
        let total = (radix as u64).checked_pow(ready.len() as u32);
        if total.is_some_and(|t| t as usize <= ATTACK_CAP) {
            let total = total.unwrap() as usize;
            let mut out = Vec::with_capacity(total);
            for code in 0..total {
                let mut groups: Vec<(InstanceId, Vec<InstanceId>)> =
                    enemies.iter().map(|&e| (e, Vec::new())).collect();
                let mut c = code;
                for &ch in &ready {
                    let slot = c % radix;
                    c /= radix;
                    if slot > 0 {
                        groups[slot - 1].1.push(ch);
                    }
                }
                out.push(Action::Attack(groups).canonical());
            }
            return out;
        }
        let mut out = vec![empty];
        for &e in &enemies {
            out.push(Action::Attack(vec![(e, ready.clone())]));
        }
        for &e in &enemies {
            for &ch in &ready {
                out.push(Action::Attack(vec![(e, vec![ch])]));
            }
        }
        out
    }

    /// Checks `action` against the rules of the current stage.
    pub(super) fn validate(&self, action: &Action) -> Result<(), GameError> {
        if let Some(o) = self.outcome {
            return Err(GameError::GameOver(o));
        }
        if self.stage.kind() != StageKind::Decision {
            return Err(GameError::WrongStage {
                op: "apply_action",
                stage: self.stage,
                kind: self.stage.kind(),
            });
        }
        if action.stage() != self.stage {
            return Err(GameError::ActionStageMismatch {
                action: action.label(),
                stage: self.stage,
            });
        }
        let illegal = |msg: String| Err(GameError::IllegalAction(msg));
        let distinct = |ids: &[InstanceId]| {
            let set: HashSet<_> = ids.iter().collect();
            set.len() == ids.len()
        };
        let ready = self.ready_characters();
        match action {
            Action::PlayCards(ids) => {
                if !distinct(ids) {
                    return illegal("a card is played twice".into());
                }
                if let Some(id) = ids.iter().find(|&&id| self.card(id).zone != Zone::Hand) {
                    return illegal(format!("{id} is not in hand"));
                }
                if !is_payable(self, ids) {
                    return illegal("hero resources cannot pay for these cards".into());
                }
            }
            Action::Commit(ids) => {
                if !distinct(ids) {
                    return illegal("a character is committed twice".into());
                }
                for &id in ids {
                    if !ready.contains(&id) {
                        return illegal(format!("{id} is not a ready character"));
                    }
                    if self.willpower(id) == 0 {
                        return illegal(format!("{id} has zero willpower"));
                    }
                }
                let w: u32 = ids.iter().map(|&id| self.willpower(id)).sum();
                if !ids.is_empty() && w as i32 <= self.staging_threat() {
                    return illegal(format!(
                        "committed willpower {w} does not exceed staging threat {}",
                        self.staging_threat()
                    ));
                }
            }
            Action::TravelTo(None) => {}
            Action::TravelTo(Some(id)) => {
                if self.in_zone(Zone::ActiveLocation).next().is_some() {
                    return illegal("there is already an active location".into());
                }
                if self.card(*id).zone != Zone::StagingArea
                    || self.kind_of(*id) != CardKind::Location
                {
                    return illegal(format!("{id} is not a location in the staging area"));
                }
            }
            Action::Defend(pairs) => {
                let enemies: Vec<InstanceId> = pairs.iter().map(|p| p.0).collect();
                if enemies != self.engaged_enemies() {
                    return illegal("defense must list every engaged enemy once, in order".into());
                }
                let defenders: Vec<InstanceId> = pairs.iter().filter_map(|p| p.1).collect();
                if !distinct(&defenders) {
                    return illegal("a character defends against two enemies".into());
                }
                if let Some(d) = defenders.iter().find(|d| !ready.contains(d)) {
                    return illegal(format!("{d} is not a ready character"));
                }
            }
            Action::Attack(groups) => {
                let engaged = self.engaged_enemies();
                let enemies: Vec<InstanceId> = groups.iter().map(|g| g.0).collect();
                if !distinct(&enemies) {
                    return illegal("an enemy is listed twice".into());
                }
                if let Some(e) = enemies.iter().find(|e| !engaged.contains(e)) {
                    return illegal(format!("{e} is not an engaged enemy"));
                }
                let attackers: Vec<InstanceId> =
                    groups.iter().flat_map(|g| g.1.iter().copied()).collect();
                if !distinct(&attackers) {
                    return illegal("a character attacks twice".into());
                }
                if let Some(a) = attackers.iter().find(|a| !ready.contains(a)) {
                    return illegal(format!("{a} is not a ready character"));
                }
            }
        }
        Ok(())
    }
}
