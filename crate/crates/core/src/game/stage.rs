use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StageKind {
    Ruled,
    Random,
    Decision,
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageKind::Ruled => "ruled",
            StageKind::Random => "random",
            StageKind::Decision => "decision",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Resource,
    Planning,
    Quest,
    Travel,
    Encounter,
    Combat,
    Refresh,
}

/// The 13 stages of a round, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageId {
    GainResourcesAndDraw,
    Planning,
    CommitCharacters,
    Staging,
    QuestResolution,
    Travel,
    EngagementChecks,
    DealShadowCards,
    DeclareDefenders,
    ResolveEnemyAttacks,
    DeclareAttackers,
    ResolvePlayerAttacks,
    Refresh,
}

impl StageId {
    pub const ALL: [StageId; 13] = [
        StageId::GainResourcesAndDraw,
        StageId::Planning,
        StageId::CommitCharacters,
        StageId::Staging,
        StageId::QuestResolution,
        StageId::Travel,
        StageId::EngagementChecks,
        StageId::DealShadowCards,
        StageId::DeclareDefenders,
        StageId::ResolveEnemyAttacks,
        StageId::DeclareAttackers,
        StageId::ResolvePlayerAttacks,
        StageId::Refresh,
    ];

    /// 1-based position in the round.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn kind(self) -> StageKind {
        use StageId::*;
        match self {
            Planning | CommitCharacters | Travel | DeclareDefenders | DeclareAttackers => {
                StageKind::Decision
            }
            Staging | DealShadowCards => StageKind::Random,
            GainResourcesAndDraw | QuestResolution | EngagementChecks | ResolveEnemyAttacks
            | ResolvePlayerAttacks | Refresh => StageKind::Ruled,
        }
    }

    pub fn phase(self) -> Phase {
        use StageId::*;
        match self {
            GainResourcesAndDraw => Phase::Resource,
            Planning => Phase::Planning,
            CommitCharacters | Staging | QuestResolution => Phase::Quest,
            Travel => Phase::Travel,
            EngagementChecks => Phase::Encounter,
            DealShadowCards | DeclareDefenders | ResolveEnemyAttacks | DeclareAttackers
            | ResolvePlayerAttacks => Phase::Combat,
            Refresh => Phase::Refresh,
        }
    }

    /// The following stage; `Refresh` wraps to `GainResourcesAndDraw`.
    pub fn next(self) -> StageId {
        Self::ALL[(self as usize + 1) % Self::ALL.len()]
    }

    pub fn name(self) -> &'static str {
        use StageId::*;
        match self {
            GainResourcesAndDraw => "GainResourcesAndDraw",
            Planning => "Planning",
            CommitCharacters => "CommitCharacters",
            Staging => "Staging",
            QuestResolution => "QuestResolution",
            Travel => "Travel",
            EngagementChecks => "EngagementChecks",
            DealShadowCards => "DealShadowCards",
            DeclareDefenders => "DeclareDefenders",
            ResolveEnemyAttacks => "ResolveEnemyAttacks",
            DeclareAttackers => "DeclareAttackers",
            ResolvePlayerAttacks => "ResolvePlayerAttacks",
            Refresh => "Refresh",
        }
    }
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
