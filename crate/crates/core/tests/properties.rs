mod common;

use std::path::Path;

use cardquest_core::agents::{expert_decide, random_decide};
use cardquest_core::cards::{CardDb, CardKind};
use cardquest_core::experiments::winrate_ci;
use cardquest_core::game::{Action, GameRng, GameState, StageId, StageKind};
use cardquest_core::search::most_wins;
use common::{fresh, shipped};
use proptest::prelude::*;
use rand::SeedableRng;

/// Half-width computed from the win and loss counts directly.
fn reference_halfwidth(wins: u64, n: u64, z: f64) -> f64 {
    let (w, l, n) = (wins as f64, (n - wins) as f64, n as f64);
    z * (w * l).sqrt() / (n * n.sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ci_agrees_with_a_second_formula((n, wins) in (1u64..20_000).prop_flat_map(|n| (Just(n), 0..=n)), z in 0.5f64..3.5) {
        let (p, h) = winrate_ci(wins, n, z).unwrap();
        prop_assert!((p - wins as f64 / n as f64).abs() < 1e-12);
        prop_assert!((h - reference_halfwidth(wins, n, z)).abs() < 1e-12);
    }

    #[test]
    fn most_wins_ignores_scale_and_picks_the_first_maximum(wins in prop::collection::vec(0u32..50, 1..30), k in 1u32..20) {
        let best = most_wins(&wins);
        let max = *wins.iter().max().unwrap();
        prop_assert_eq!(best, wins.iter().position(|&w| w == max).unwrap());
        let scaled: Vec<u32> = wins.iter().map(|w| w * k).collect();
        prop_assert_eq!(most_wins(&scaled), best);
    }

    #[test]
    fn card_databases_survive_a_toml_round_trip(stats in prop::collection::vec(1u32..40, 64)) {
        let setup = shipped("medium");
        let defs: Vec<_> = setup
            .db()
            .iter()
            .zip(stats.iter().cycle())
            .map(|(d, &v)| {
                let mut d = d.clone();
                match d.kind {
                    CardKind::Hero | CardKind::Ally => {
                        d.hit_points = v;
                        d.willpower = v % 7;
                    }
                    CardKind::Enemy => {
                        d.attack = v % 9;
                        d.engagement_cost = v;
                    }
                    CardKind::Location | CardKind::Quest => d.quest_points = v,
                    _ => {}
                }
                d
            })
            .collect();
        let db = CardDb::from_defs(defs).unwrap();
        let back = CardDb::parse(&db.to_toml_string(), Path::new("round-trip.toml")).unwrap();
        prop_assert_eq!(back, db);
    }
}

fn check_commits(s: &GameState, legals: &[Action]) -> Result<(), TestCaseError> {
    let threat = s.staging_threat();
    let ready = s.ready_characters();
    for a in legals {
        let Action::Commit(ids) = a else {
            return Err(TestCaseError::fail(format!("{a:?} offered at commit")));
        };
        prop_assert!(ids.iter().all(|id| ready.contains(id)));
        let w: u32 = ids.iter().map(|&id| s.willpower(id)).sum();
        prop_assert!(
            ids.is_empty() || w as i32 > threat,
            "{ids:?} with {w} against {threat}"
        );
    }
    Ok(())
}

fn check_defenses(s: &GameState, legals: &[Action]) -> Result<(), TestCaseError> {
    let enemies = s.engaged_enemies();
    let ready = s.ready_characters();
    for a in legals {
        let Action::Defend(pairs) = a else {
            return Err(TestCaseError::fail(format!("{a:?} offered at defense")));
        };
        prop_assert_eq!(
            pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
            enemies.clone()
        );
        let mut used: Vec<_> = pairs.iter().filter_map(|p| p.1).collect();
        prop_assert!(used.iter().all(|d| ready.contains(d)));
        let before = used.len();
        used.sort_unstable();
        used.dedup();
        prop_assert_eq!(used.len(), before, "a character defends twice");
    }
    Ok(())
}

/// Plays one game with a per-decision coin flip between the random and the
/// expert agent, checking the engine after every step.
fn fuzz_game(difficulty: &str, seed: u64) -> Result<GameState, TestCaseError> {
    let setup = shipped(difficulty);
    let mut s = fresh(&setup, seed);
    let mut rng = GameRng::seed_from_u64(seed ^ 0x5eed);
    let mut quest = (s.quest_index(), s.quest_progress());
    while !s.is_over() {
        prop_assert!(s.round() <= 200, "game {seed} runs past round 200");
        match s.stage().kind() {
            StageKind::Decision => {
                let legals = s.legal_actions().unwrap();
                prop_assert!(!legals.is_empty());
                match s.stage() {
                    StageId::CommitCharacters => check_commits(&s, &legals)?,
                    StageId::DeclareDefenders => check_defenses(&s, &legals)?,
                    _ => {}
                }
                let pick = if rand::Rng::gen_bool(&mut rng, 0.5) {
                    random_decide(&s, &legals, &mut rng)
                } else {
                    expert_decide(&s, &legals, &mut rng)
                };
                prop_assert!(legals.contains(&pick), "{pick:?} not legal");
                s.apply(&pick).unwrap();
            }
            StageKind::Ruled => {
                prop_assert!(s.legal_actions().is_err());
                s.advance_ruled().unwrap();
            }
            StageKind::Random => {
                prop_assert!(s.legal_actions().is_err());
                s.resolve_random(&mut rng).unwrap();
            }
        }
        if let Err(e) = s.check_invariants() {
            return Err(TestCaseError::fail(format!("seed {seed}: {e}")));
        }
        let now = (s.quest_index(), s.quest_progress());
        prop_assert!(
            now.0 > quest.0 || (now.0 == quest.0 && now.1 >= quest.1),
            "progress went back"
        );
        quest = now;
    }
    Ok(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn engine_invariants_hold_under_mixed_play(seed in any::<u64>(), hard in any::<bool>()) {
        let difficulty = if hard { "hard" } else { "medium" };
        let a = fuzz_game(difficulty, seed)?;
        let b = fuzz_game(difficulty, seed)?;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn expert_commits_beat_the_threat_and_defenses_use_allies_first(seed in any::<u64>()) {
        let setup = shipped("medium");
        let mut s = fresh(&setup, seed);
        let mut rng = GameRng::seed_from_u64(seed);
        while !s.is_over() {
            s.run_until_decision(&mut rng);
            if s.is_over() {
                break;
            }
            let legals = s.legal_actions().unwrap();
            let pick = expert_decide(&s, &legals, &mut rng);
            match &pick {
                Action::Commit(ids) if !ids.is_empty() => {
                    let w: u32 = ids.iter().map(|&id| s.willpower(id)).sum();
                    prop_assert!(w as i32 > s.staging_threat());
                }
                Action::Defend(pairs) => {
                    let uses_hero = pairs.iter().filter_map(|p| p.1).any(|d| s.kind_of(d) == CardKind::Hero);
                    let spare_ally = s
                        .ready_characters()
                        .into_iter()
                        .any(|c| s.kind_of(c) == CardKind::Ally && !pairs.iter().any(|p| p.1 == Some(c)));
                    prop_assert!(!(uses_hero && spare_ally), "hero defends while an ally stays back");
                    let undefended = pairs.iter().any(|p| p.1.is_none());
                    prop_assert!(!undefended || pairs.iter().filter(|p| p.1.is_some()).count() == s.ready_characters().len());
                }
                _ => {}
            }
            s.apply(&pick).unwrap();
        }
    }
}
