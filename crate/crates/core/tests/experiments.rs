mod common;

use cardquest_core::agents::{AgentKind, PlayoutPolicy, StagePolicyMap};
use cardquest_core::experiments::{
    budget_sweep, combination_grid, play_game, run_games, seed_for_game, winrate_ci, write_csv,
    write_json, ExperimentConfig, ExperimentError, GameStreams, StageChoices, StatsError,
    CSV_COLUMNS,
};
use common::{data_dir, shipped};

fn config(games: u32, agents: &str) -> ExperimentConfig {
    ExperimentConfig {
        games,
        master_seed: 7,
        cards: data_dir().join("cards.toml"),
        scenario: data_dir().join("scenarios/mirkwood-passage.toml"),
        difficulty: "medium".into(),
        policy_map: agents.parse().unwrap(),
        workers: 1,
        z: 1.96,
    }
}

#[test]
fn confidence_halfwidth_matches_hand_evaluation() {
    // 1.96 * sqrt(0.5 * 0.5 / 1000)
    let hand = 1.96 * (0.000_25_f64).sqrt();
    assert!((hand - 0.030_990_321_069_650_11).abs() < 1e-12);
    let (p, h) = winrate_ci(500, 1000, 1.96).unwrap();
    assert_eq!(p, 0.5);
    assert!((h - hand).abs() < 1e-9);
    assert_eq!(winrate_ci(0, 37, 1.96).unwrap(), (0.0, 0.0));
    assert_eq!(winrate_ci(37, 37, 1.96).unwrap(), (1.0, 0.0));
    assert!(matches!(winrate_ci(0, 0, 1.96), Err(StatsError::NoTrials)));
    assert!(winrate_ci(5, 4, 1.96).is_err());
}

#[test]
fn game_seeds_are_a_pure_function_of_master_and_index() {
    assert_eq!(seed_for_game(7, 3), seed_for_game(7, 3));
    assert_ne!(seed_for_game(7, 3), seed_for_game(7, 4));
    assert_ne!(seed_for_game(7, 3), seed_for_game(8, 3));
}

#[test]
fn one_game_batch() {
    let stats = run_games(&config(1, "random")).unwrap();
    assert_eq!(stats.n, 1);
    assert!(stats.wins <= 1);
    assert!(stats.wall_time_s > 0.0);
    let again = run_games(&config(1, "random")).unwrap();
    assert!(stats.same_results(&again));
}

#[test]
fn worker_count_does_not_change_results() {
    let mut cfg = config(
        24,
        "planning=flat:4:random,commit=expert,defense=mcts:4:0.7:expert",
    );
    let one = run_games(&cfg).unwrap();
    cfg.workers = 8;
    let eight = run_games(&cfg).unwrap();
    assert!(one.same_results(&eight), "{one:?} vs {eight:?}");
}

#[test]
fn wins_add_up_over_any_split_of_the_batch() {
    let cfg = config(30, "expert");
    let total = run_games(&cfg).unwrap();
    let setup = shipped("medium");
    let play = |i: u64| {
        play_game(
            &setup,
            &cfg.policy_map,
            GameStreams::new(seed_for_game(7, i)),
            None,
        )
    };
    let evens = (0..30)
        .step_by(2)
        .filter(|&i| play(i).outcome.is_win())
        .count();
    let odds = (1..30)
        .step_by(2)
        .filter(|&i| play(i).outcome.is_win())
        .count();
    assert_eq!((evens + odds) as u64, total.wins);
    assert_eq!(total.outcomes.win, total.wins);
}

#[test]
fn search_and_other_decisions_are_timed_separately() {
    let stats = run_games(&config(
        3,
        "planning=expert,commit=flat:5:expert,defense=expert",
    ))
    .unwrap();
    assert!(stats.mean_decision_time_search_s > 0.0);
    assert!(stats.mean_decision_time_other_s >= 0.0);
    assert!(stats.mean_game_time_s > 0.0);
}

#[test]
fn invalid_configurations_are_rejected() {
    let mut cfg = config(0, "expert");
    assert!(matches!(run_games(&cfg), Err(ExperimentError::Config(_))));
    cfg.games = 1;
    cfg.workers = 0;
    assert!(matches!(run_games(&cfg), Err(ExperimentError::Config(_))));
    cfg.workers = 1;
    cfg.difficulty = "nightmare".into();
    assert!(matches!(run_games(&cfg), Err(ExperimentError::Game(_))));
    let mut cfg = config(1, "expert");
    cfg.scenario = data_dir().join("scenarios/missing.toml");
    assert!(matches!(run_games(&cfg), Err(ExperimentError::Data(_))));
}

#[test]
fn sweep_has_one_row_per_budget() {
    let rows = budget_sweep(&config(2, "flat:10:expert"), &[10, 20, 40]).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        vec![10, 20, 40]
    );
    assert!(rows.iter().all(|r| r.1.n == 2));
    assert!(matches!(
        budget_sweep(&config(2, "expert"), &[10]),
        Err(ExperimentError::Config(_))
    ));
    assert!(matches!(
        budget_sweep(&config(2, "flat:10:expert"), &[]),
        Err(ExperimentError::Config(_))
    ));
}

#[test]
fn grid_covers_the_cartesian_product() {
    let pick = vec![AgentKind::Expert, AgentKind::Random];
    let choices = StageChoices {
        planning: pick.clone(),
        commit: pick.clone(),
        defense: pick,
    };
    let rows = combination_grid(&config(1, "expert"), &choices).unwrap();
    let labels: Vec<String> = rows.iter().map(|r| r.0.short_label()).collect();
    assert_eq!(
        labels,
        ["2-2-2", "2-2-1", "2-1-2", "2-1-1", "1-2-2", "1-2-1", "1-1-2", "1-1-1"]
    );

    let search = vec![
        AgentKind::Expert,
        AgentKind::MctsUcb {
            budget: 40,
            exploration: 0.7,
            playout: PlayoutPolicy::Expert,
        },
    ];
    let eight = StageChoices {
        planning: search.clone(),
        commit: search.clone(),
        defense: search,
    };
    assert_eq!(eight.assignments(None).len(), 8);
    let empty = StageChoices {
        planning: vec![],
        commit: vec![AgentKind::Expert],
        defense: vec![AgentKind::Expert],
    };
    assert!(matches!(
        combination_grid(&config(1, "expert"), &empty),
        Err(ExperimentError::Config(_))
    ));
}

#[test]
fn csv_and_json_carry_the_configuration() {
    let cfg = config(2, "expert");
    let stats = run_games(&cfg).unwrap();
    let rows = vec![(
        StagePolicyMap::uniform(AgentKind::Expert).short_label(),
        stats,
    )];

    let mut csv = Vec::new();
    write_csv(&mut csv, &cfg, &rows).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config: {"));
    assert!(lines[0].contains("\"master_seed\":7"));
    assert_eq!(lines[1], CSV_COLUMNS.join(","));
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("2-2-2,2,"));
    assert_eq!(lines[2].split(',').count(), CSV_COLUMNS.len());

    let mut json = Vec::new();
    write_json(&mut json, &cfg, &rows).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(doc["config"]["games"], 2);
    assert_eq!(doc["rows"][0]["label"], "2-2-2");
    assert_eq!(doc["rows"][0]["n"], 2);
    assert!(doc["rows"][0]["ci_halfwidth"].is_number());
}

#[test]
fn traces_cover_every_stage_and_end_with_the_outcome() {
    let setup = shipped("medium");
    let mut lines = Vec::new();
    let map: StagePolicyMap = "expert".parse().unwrap();
    let record = play_game(
        &setup,
        &map,
        GameStreams::new(seed_for_game(1, 0)),
        Some(&mut lines),
    );
    assert!(lines[0].starts_with("[round   1]  1 GainResourcesAndDraw"));
    assert!(lines.iter().any(|l| l.contains(" 2 Planning")));
    assert!(lines.iter().any(|l| l.contains(" 9 DeclareDefenders")));
    assert_eq!(
        lines.last().unwrap(),
        &format!(
            "[end] outcome {:?} in round {}",
            record.outcome, record.rounds
        )
    );
}
