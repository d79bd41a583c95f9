mod common;

use cardquest_core::agents::{random_decide, PlayoutPolicy};
use cardquest_core::game::{Action, GameRng, GameState, StageId};
use cardquest_core::search::{
    allocate_budget, most_wins, playout, ucb_score, FlatMonteCarlo, MctsUcb, SearchConfig,
};
use common::{fresh, shipped};
use rand::{Rng, SeedableRng};

fn config(budget: u32, playout: PlayoutPolicy) -> SearchConfig {
    SearchConfig {
        playout_budget: budget,
        playout,
        ..SearchConfig::default()
    }
}

/// Decision states with at least two legal actions, reached by random play.
fn sample_states(count: usize, seed: u64) -> Vec<(GameState, Vec<Action>)> {
    let setup = shipped("medium");
    let mut rng = GameRng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut game = 0;
    while out.len() < count {
        let mut s = fresh(&setup, seed.wrapping_add(game));
        game += 1;
        loop {
            s.run_until_decision(&mut rng);
            if s.is_over() {
                break;
            }
            let legals = s.legal_actions().unwrap();
            let searched = matches!(
                s.stage(),
                StageId::Planning | StageId::CommitCharacters | StageId::DeclareDefenders
            );
            if searched && legals.len() >= 2 && legals.len() <= 12 && rng.gen_bool(0.3) {
                out.push((s.clone(), legals));
                break;
            }
            let a = random_decide(&s, &legals, &mut rng);
            s.apply(&a).unwrap();
        }
    }
    out
}

#[test]
fn ucb_matches_a_hand_evaluation() {
    // 0.6 + 0.7 * sqrt(2 * ln(100) / 10), with ln(100) = 4.605170185988091.
    let hand = 0.6 + 0.7 * (0.921_034_037_197_618_3_f64).sqrt();
    assert!((hand - 1.271_793_627_706_331).abs() < 1e-12);
    assert!((ucb_score(6, 10, 100, 0.7) - hand).abs() < 1e-9);
}

#[test]
fn ucb_without_exploration_is_the_win_ratio() {
    assert_eq!(ucb_score(6, 10, 100, 0.0), 6.0 / 10.0);
    assert_eq!(ucb_score(3, 7, 50, 0.0), 3.0 / 7.0);
    assert_eq!(ucb_score(5, 9, 40, 0.7), ucb_score(5, 9, 40, 0.7));
    assert!(ucb_score(1, 2, 10, 0.7) > ucb_score(1, 2, 10, 0.3));
}

#[test]
fn budget_splits_by_floor_with_remainder_first() {
    assert_eq!(allocate_budget(40, 8), vec![5; 8]);
    assert_eq!(allocate_budget(10, 3), vec![4, 3, 3]);
    assert_eq!(allocate_budget(7, 10), vec![1, 1, 1, 1, 1, 1, 1, 0, 0, 0]);
    assert_eq!(most_wins(&[2, 5, 5, 1]), 1);
    assert_eq!(most_wins(&[0, 0, 0]), 0);
}

#[test]
fn terminal_states_play_out_to_their_outcome() {
    let mut s = fresh(&shipped("easy"), 0);
    s.set_outcome(Some(cardquest_core::game::Outcome::LossThreat));
    let before = s.clone();
    let out = playout(
        &s,
        PlayoutPolicy::Random,
        &mut GameRng::seed_from_u64(1),
        100,
    );
    assert_eq!(out, cardquest_core::game::Outcome::LossThreat);
    assert_eq!(s, before);
}

#[test]
fn playouts_are_reproducible() {
    let s = fresh(&shipped("medium"), 4);
    for policy in [PlayoutPolicy::Random, PlayoutPolicy::Expert] {
        let a = playout(&s, policy, &mut GameRng::seed_from_u64(8), 100);
        let b = playout(&s, policy, &mut GameRng::seed_from_u64(8), 100);
        assert_eq!(a, b);
    }
}

#[test]
fn random_playouts_from_the_start_sometimes_win_and_sometimes_lose() {
    let s = fresh(&shipped("medium"), 11);
    let mut rng = GameRng::seed_from_u64(5);
    let wins = (0..500)
        .filter(|_| playout(&s, PlayoutPolicy::Random, &mut rng, 100).is_win())
        .count();
    assert!(wins > 0 && wins < 500, "{wins}");
}

#[test]
fn single_legal_action_needs_no_playouts() {
    let (s, legals) = &sample_states(1, 3)[0];
    let only = &legals[..1];
    let mut rng = GameRng::seed_from_u64(0);
    let flat = FlatMonteCarlo::new(config(40, PlayoutPolicy::Expert)).search(s, only, &mut rng);
    assert_eq!((flat.action.clone(), flat.playouts), (only[0].clone(), 0));
    let mcts = MctsUcb::new(config(40, PlayoutPolicy::Expert)).search(s, only, &mut rng);
    assert_eq!((mcts.action, mcts.playouts), (only[0].clone(), 0));
}

#[test]
fn every_decision_spends_exactly_its_budget() {
    let states = sample_states(6, 17);
    for budget in [1, 7, 40] {
        for policy in [PlayoutPolicy::Expert, PlayoutPolicy::Random] {
            for (i, (s, legals)) in states.iter().enumerate() {
                let mut rng = GameRng::seed_from_u64(i as u64);
                let flat = FlatMonteCarlo::new(config(budget, policy)).search(s, legals, &mut rng);
                assert_eq!(flat.playouts, u64::from(budget), "flat, budget {budget}");
                let visits: u32 = flat.children.iter().map(|c| c.2).sum();
                assert_eq!(visits, budget);

                let mcts = MctsUcb::new(config(budget, policy));
                let mut iterations = 0u32;
                let (_, tree) = mcts.search_tree(s, legals, &mut rng, |t| {
                    iterations += 1;
                    assert_eq!(t.root().visits, iterations);
                    t.check_consistency().unwrap();
                });
                assert_eq!(tree.playouts, u64::from(budget), "mcts, budget {budget}");
                assert_eq!(tree.root().visits, budget);
            }
        }
    }
}

#[test]
fn searches_are_reproducible_and_legal() {
    for (i, (s, legals)) in sample_states(5, 23).iter().enumerate() {
        for policy in [PlayoutPolicy::Expert, PlayoutPolicy::Random] {
            let flat = FlatMonteCarlo::new(config(20, policy));
            let a = flat
                .search(s, legals, &mut GameRng::seed_from_u64(i as u64))
                .action;
            let b = flat
                .search(s, legals, &mut GameRng::seed_from_u64(i as u64))
                .action;
            assert_eq!(a, b);
            assert!(legals.contains(&a));
            let mcts = MctsUcb::new(config(20, policy));
            let a = mcts
                .search(s, legals, &mut GameRng::seed_from_u64(i as u64))
                .action;
            let b = mcts
                .search(s, legals, &mut GameRng::seed_from_u64(i as u64))
                .action;
            assert_eq!(a, b);
            assert!(legals.contains(&a));
        }
    }
}

#[test]
fn root_children_follow_legal_order() {
    let (s, legals) = &sample_states(1, 31)[0];
    let n = legals.len() as u32;
    let report = MctsUcb::new(config(n, PlayoutPolicy::Expert)).search(
        s,
        legals,
        &mut GameRng::seed_from_u64(2),
    );
    let order: Vec<Action> = report.children.iter().map(|c| c.0.clone()).collect();
    assert_eq!(&order, legals);
    assert!(report.children.iter().all(|c| c.2 == 1));
}

#[test]
fn depth_one_greedy_mcts_agrees_with_flat() {
    for (i, (s, legals)) in sample_states(20, 41).iter().enumerate() {
        let n = legals.len() as u32;
        let flat_cfg = config(n, PlayoutPolicy::Expert);
        let mcts_cfg = SearchConfig {
            exploration: 0.0,
            max_depth: Some(1),
            ..flat_cfg
        };
        let flat =
            FlatMonteCarlo::new(flat_cfg).search(s, legals, &mut GameRng::seed_from_u64(i as u64));
        let mcts = MctsUcb::new(mcts_cfg).search(s, legals, &mut GameRng::seed_from_u64(i as u64));
        assert_eq!(flat.children, mcts.children, "state {i}");
        assert_eq!(flat.action, mcts.action, "state {i}");
    }
}
