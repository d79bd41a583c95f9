use std::fmt;

use super::{InstanceId, StageId};

/// A decision, tagged by the stage it belongs to.
///
/// Payloads are kept in canonical order (ids ascending) so that equal
/// decisions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    /// Hand cards to pay for and put into play.
    PlayCards(Vec<InstanceId>),
    /// Characters sent on the quest.
    Commit(Vec<InstanceId>),
    /// Staging-area location to make active, or none.
    TravelTo(Option<InstanceId>),
    /// One entry per engaged enemy: its defender, if any.
    Defend(Vec<(InstanceId, Option<InstanceId>)>),
    /// Attacked enemies with their attackers. Enemies nobody attacks are omitted.
    Attack(Vec<(InstanceId, Vec<InstanceId>)>),
}

impl Action {
    pub fn stage(&self) -> StageId {
        match self {
            Action::PlayCards(_) => StageId::Planning,
            Action::Commit(_) => StageId::CommitCharacters,
            Action::TravelTo(_) => StageId::Travel,
            Action::Defend(_) => StageId::DeclareDefenders,
            Action::Attack(_) => StageId::DeclareAttackers,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Action::PlayCards(_) => "PlayCards",
            Action::Commit(_) => "Commit",
            Action::TravelTo(_) => "TravelTo",
            Action::Defend(_) => "Defend",
            Action::Attack(_) => "Attack",
        }
    }

    /// The do-nothing action of a decision stage, given the engaged enemies
    /// for `Defend`.
    pub fn pass(stage: StageId, engaged: &[InstanceId]) -> Option<Action> {
        Some(match stage {
            StageId::Planning => Action::PlayCards(Vec::new()),
            StageId::CommitCharacters => Action::Commit(Vec::new()),
            StageId::Travel => Action::TravelTo(None),
            StageId::DeclareDefenders => {
                Action::Defend(engaged.iter().map(|&e| (e, None)).collect())
            }
            StageId::DeclareAttackers => Action::Attack(Vec::new()),
            _ => return None,
        })
    }

    /// Sorts payloads into canonical order.
    pub fn canonical(mut self) -> Action {
        match &mut self {
            Action::PlayCards(ids) | Action::Commit(ids) => ids.sort_unstable(),
            Action::TravelTo(_) => {}
            Action::Defend(pairs) => pairs.sort_unstable(),
            Action::Attack(groups) => {
                groups.retain(|(_, a)| !a.is_empty());
                for (_, attackers) in groups.iter_mut() {
                    attackers.sort_unstable();
                }
                groups.sort_unstable();
            }
        }
        self
    }
}

impl Action {
    /// Text form with each instance id rendered by `name`.
    pub fn describe(&self, name: impl Fn(InstanceId) -> String) -> String {
        let list = |ids: &[InstanceId]| {
            let parts: Vec<String> = ids.iter().map(|&id| name(id)).collect();
            format!("{{{}}}", parts.join(","))
        };
        match self {
            Action::PlayCards(v) => format!("play {}", list(v)),
            Action::Commit(v) => format!("commit {}", list(v)),
            Action::TravelTo(None) => "travel none".into(),
            Action::TravelTo(Some(l)) => format!("travel {}", name(*l)),
            Action::Defend(pairs) => {
                let parts: Vec<String> = pairs
                    .iter()
                    .map(|(e, d)| match d {
                        Some(d) => format!("{}<-{}", name(*e), name(*d)),
                        None => format!("{}<-none", name(*e)),
                    })
                    .collect();
                format!("defend {{{}}}", parts.join(","))
            }
            Action::Attack(groups) => {
                let parts: Vec<String> = groups
                    .iter()
                    .map(|(e, a)| format!("{}<-{}", name(*e), list(a)))
                    .collect();
                format!("attack {{{}}}", parts.join(","))
            }
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(|id| id.to_string()))
    }
}
