use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use cardquest_core::agents::{AgentKind, StagePolicyMap};
use cardquest_core::experiments::{
    budget_sweep, combination_grid, play_game, run_games, seed_for_game, write_csv, write_json,
    ExperimentConfig, GameStreams, RunStats, StageChoices, DEFAULT_Z,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "cardquest",
    version,
    about = "Solo card-game simulator with Monte-Carlo search agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and print its stage log.
    Play(PlayArgs),
    /// Play a batch of games with one stage assignment.
    Simulate(BatchArgs),
    /// One batch per playout budget.
    Sweep(SweepArgs),
    /// One batch per combination of per-stage agents.
    Grid(GridArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Card database (TOML).
    #[arg(long, default_value = "data/cards.toml")]
    cards: PathBuf,
    /// Scenario file (TOML).
    #[arg(long, default_value = "data/scenarios/mirkwood-passage.toml")]
    scenario: PathBuf,
    #[arg(long, default_value = "medium")]
    difficulty: String,
    /// Stage assignment, e.g. `planning=mcts:40:0.7:expert,commit=expert,defense=mcts:40:0.7:expert`.
    /// A single agent string applies to all three stages.
    #[arg(long, default_value = "expert", value_parser = parse_map)]
    agents: StagePolicyMap,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PlayArgs {
    #[command(flatten)]
    common: Common,
    /// Print one line per stage instead of only the result.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Clone)]
struct BatchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100)]
    games: u32,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file, `-` for standard output.
    #[arg(long, default_value = "-")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Critical value of the confidence interval.
    #[arg(long, default_value_t = DEFAULT_Z)]
    z: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    batch: BatchArgs,
    /// Comma-separated playout budgets.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40,80")]
    budgets: Vec<u32>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    batch: BatchArgs,
    /// Candidates per stage, e.g. `planning=expert,mcts:40:0.7:expert;commit=expert;defense=expert,random`.
    /// Stages left out keep the agent from `--agents`.
    #[arg(long)]
    choices: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

fn parse_map(s: &str) -> Result<StagePolicyMap, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_choices(text: &str, defaults: &StagePolicyMap) -> Result<StageChoices> {
    let mut choices = StageChoices {
        planning: vec![defaults.planning],
        commit: vec![defaults.commit],
        defense: vec![defaults.defense],
    };
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((stage, list)) = part.split_once('=') else {
            bail!("invalid choice `{part}` (expected <stage>=<agent>[,<agent>...])");
        };
        let agents = list
            .split(',')
            .map(|a| a.trim().parse::<AgentKind>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("in choice `{part}`"))?;
        let slot = match stage.trim() {
            "planning" => &mut choices.planning,
            "commit" => &mut choices.commit,
            "defense" | "defence" => &mut choices.defense,
            other => {
                bail!("unknown stage `{other}` in --choices (expected planning, commit or defense)")
            }
        };
        *slot = agents;
    }
    Ok(choices)
}

impl BatchArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let workers = match self.workers {
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let config = ExperimentConfig {
            games: self.games,
            master_seed: self.common.seed,
            cards: self.common.cards.clone(),
            scenario: self.common.scenario.clone(),
            difficulty: self.common.difficulty.clone(),
            policy_map: self.common.agents,
            workers,
            z: self.z,
        };
        config.validate()?;
        // Surface data errors before any game is played.
        config.load_setup().with_context(|| {
            format!(
                "cannot load `{}` / `{}`",
                config.cards.display(),
                config.scenario.display()
            )
        })?;
        Ok(config)
    }

    fn write(&self, meta: &impl Serialize, rows: &[(String, RunStats)]) -> Result<()> {
        let out: Box<dyn Write> = if self.out.as_os_str() == "-" {
            Box::new(io::stdout().lock())
        } else {
            let file = File::create(&self.out)
                .with_context(|| format!("cannot create `{}`", self.out.display()))?;
            Box::new(file)
        };
        let mut out = BufWriter::new(out);
        match self.format {
            Format::Csv => write_csv(&mut out, meta, rows)?,
            Format::Json => {
                write_json(&mut out, meta, rows)?;
                writeln!(out)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct Meta<'a, X: Serialize> {
    mode: &'static str,
    #[serde(flatten)]
    config: &'a ExperimentConfig,
    format: Format,
    #[serde(flatten)]
    extra: X,
}

fn play(args: &PlayArgs) -> Result<()> {
    let c = &args.common;
    let config = ExperimentConfig {
        games: 1,
        master_seed: c.seed,
        cards: c.cards.clone(),
        scenario: c.scenario.clone(),
        difficulty: c.difficulty.clone(),
        policy_map: c.agents,
        workers: 1,
        z: DEFAULT_Z,
    };
    let setup = config.load_setup().with_context(|| {
        format!(
            "cannot load `{}` / `{}`",
            c.cards.display(),
            c.scenario.display()
        )
    })?;
    let mut lines = Vec::new();
    let streams = GameStreams::new(seed_for_game(c.seed, 0));
    let record = play_game(&setup, &c.agents, streams, args.trace.then_some(&mut lines));
    let mut out = io::stdout().lock();
    writeln!(out, "# config: {}", serde_json::to_string(&config)?)?;
    for line in &lines {
        writeln!(out, "{line}")?;
    }
    writeln!(
        out,
        "[result] {:?} after {} rounds ({:.3}s)",
        record.outcome, record.rounds, record.game_time_s
    )?;
    Ok(())
}

fn simulate(args: &BatchArgs) -> Result<()> {
    let config = args.config()?;
    let stats = run_games(&config)?;
    let rows = vec![(config.policy_map.short_label(), stats)];
    args.write(
        &Meta {
            mode: "simulate",
            config: &config,
            format: args.format,
            extra: (),
        },
        &rows,
    )
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let config = args.batch.config()?;
    let rows: Vec<(String, RunStats)> = budget_sweep(&config, &args.budgets)?
        .into_iter()
        .map(|(b, s)| (b.to_string(), s))
        .collect();
    #[derive(Serialize)]
    struct Extra<'a> {
        budgets: &'a [u32],
    }
    let meta = Meta {
        mode: "sweep",
        config: &config,
        format: args.batch.format,
        extra: Extra {
            budgets: &args.budgets,
        },
    };
    args.batch.write(&meta, &rows)
}

fn grid(args: &GridArgs) -> Result<()> {
    let config = args.batch.config()?;
    let choices = parse_choices(&args.choices, &config.policy_map)?;
    let rows: Vec<(String, RunStats)> = combination_grid(&config, &choices)?
        .into_iter()
        .map(|(map, s)| (map.short_label(), s))
        .collect();
    let names = |v: &[AgentKind]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    #[derive(Serialize)]
    struct Extra {
        choices: [(&'static str, Vec<String>); 3],
    }
    let extra = Extra {
        choices: [
            ("planning", names(&choices.planning)),
            ("commit", names(&choices.commit)),
            ("defense", names(&choices.defense)),
        ],
    };
    let meta = Meta {
        mode: "grid",
        config: &config,
        format: args.batch.format,
        extra,
    };
    args.batch.write(&meta, &rows)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Play(a) => play(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Grid(a) => grid(&a),
    }
}
