use rand::SeedableRng;

use crate::agents::{attack_rule, travel_rule, PlayoutPolicy};
use crate::game::{GameRng, GameState, Outcome, StageId};

/// A playout still running after this many rounds counts as a loss.
pub const DEFAULT_ROUND_CAP: u32 = 100;

/// Plays a determinized copy of `state` to the end. Decisions at Planning,
/// Commit and Defense come from `policy`; Travel and attacks follow the
/// fixed rules. Returns the outcome; `state` is untouched.
pub fn playout(
    state: &GameState,
    policy: PlayoutPolicy,
    rng: &mut GameRng,
    round_cap: u32,
) -> Outcome {
    if let Some(o) = state.outcome() {
        return o;
    }
    let mut copy = state.clone();
    copy.determinize(rng);
    rollout(&mut copy, policy, rng, round_cap)
}

/// Plays `state` forward in place, without determinizing first.
pub fn rollout(
    state: &mut GameState,
    policy: PlayoutPolicy,
    rng: &mut GameRng,
    round_cap: u32,
) -> Outcome {
    let start = state.round();
    loop {
        state.run_until_decision(rng);
        if let Some(o) = state.outcome() {
            return o;
        }
        if state.round() - start >= round_cap {
            return Outcome::LossThreat;
        }
        let action = match state.stage() {
            StageId::Travel => travel_rule(state),
            StageId::DeclareAttackers => attack_rule(state),
            _ => policy.act(state, rng),
        };
        state
            .apply(&action)
            .expect("playout policies only produce legal actions");
    }
}

/// Random source of the `index`-th playout below a root child. A search
/// draws one `base` per decision, so the k-th playout of every root child
/// sees the same deck shuffles and reveals (common random numbers), which
/// makes sibling comparisons far less noisy.
pub(super) fn playout_rng(base: u64, index: u32) -> GameRng {
    let mut rng = GameRng::seed_from_u64(base);
    rng.set_stream(u64::from(index));
    rng
}

/// Advances past ruled and random stages and the fixed-rule decisions
/// (Travel, attacks) to the next stage a search tree branches on.
pub(super) fn advance_to_branch(state: &mut GameState, rng: &mut GameRng) {
    loop {
        state.run_until_decision(rng);
        if state.is_over() {
            return;
        }
        let action = match state.stage() {
            StageId::Travel => travel_rule(state),
            StageId::DeclareAttackers => attack_rule(state),
            _ => return,
        };
        state
            .apply(&action)
            .expect("fixed rules produce legal actions");
    }
}
