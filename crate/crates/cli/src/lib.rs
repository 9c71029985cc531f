//! `efrlab` command line: solve games, check the BI/EFR theorems on random
//! games, build opponent schedules, simulate populations, serve sessions and
//! analyze choice logs.

pub mod server;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use efrlab_core::analysis::{
    all_rows, choice_grids, compare_grids, grids_to_csv, grids_to_svg, group_test, simulate_population, AgentSpec, Thresholds, STANDARD_PAIRS,
};
use efrlab_core::game::shipped::{game, GameId};
use efrlab_core::game::{load_game, GameTree};
use efrlab_core::opponent::{generate_schedule, verify_schedule, OpponentConfig, OpponentSchedule};
use efrlab_core::session::{parse_export, write_csv, ExportRow};
use efrlab_core::solver::{check_theorems, random_game, render_table, solve, RandomGameConfig};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 2015;

#[derive(Parser, Debug)]
#[command(name = "efrlab", version, about = "Backward induction, EFR and the marble-drop experiment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print BI and EFR strategy sets.
    Solve(SolveArgs),
    /// Check the BI/EFR relations on seeded random games.
    Theorems(TheoremArgs),
    /// Generate (or verify) an opponent schedule.
    Schedule(ScheduleArgs),
    /// Run synthetic participants through full sessions.
    Simulate(SimulateArgs),
    /// Serve the session HTTP API.
    Serve(ServeArgs),
    /// Choice grids, game-pair comparisons and the group test.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Game file, or a shipped game name such as `game1`. Repeatable;
    /// defaults to the six experimental games.
    #[arg(long = "game")]
    pub games: Vec<String>,
    /// Print the full summary as JSON.
    #[arg(long)]
    pub json: bool,
    /// Directory searched for relative game paths.
    #[arg(long, env = "EFRLAB_DATA")]
    pub data: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TheoremArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Only games without relevant ties.
    #[arg(long)]
    pub no_ties: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Largest payoff; defaults to 9 with `--no-ties`, else 3.
    #[arg(long)]
    pub payoff_max: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.75)]
    pub deviation_rate: f64,
    #[arg(long, default_value_t = 8)]
    pub rounds: usize,
    /// Write the schedule JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Verify an existing schedule file instead of generating one.
    #[arg(long)]
    pub verify: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Comma-separated `kind[:error]=count` list, e.g. `efr=25,random:0=25`.
    #[arg(long, default_value = DEFAULT_POPULATION)]
    pub agents: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.75)]
    pub deviation_rate: f64,
    #[arg(long, default_value_t = 14)]
    pub practice: usize,
    /// Output directory for `trials.csv` and per-participant event logs.
    #[arg(long, default_value = "sim-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory for per-session event logs; sessions found there are
    /// restored on start.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Export CSV to analyze. Without it a default synthetic population is
    /// simulated first.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Smallest d-frequency difference counted as "much".
    #[arg(long, default_value_t = 3.0 / 8.0)]
    pub much: f64,
    /// Smallest d-frequency difference counted at all.
    #[arg(long, default_value_t = 1.0 / 8.0)]
    pub slight: f64,
    /// Output directory for grids and comparison tables.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fifty participants of mixed types, a little noisy.
pub const DEFAULT_POPULATION: &str =
    "efr:0.1=10,bi:0.1=5,own-max:0.1=10,ev5050:0.1=10,risk-averse:0.1=5,random=10";

pub fn parse_population(text: &str) -> Result<Vec<(AgentSpec, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|part| {
            let (spec, count) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("`{part}`: expected kind=count"))?;
            let count = count
                .trim()
                .parse::<usize>()
                .with_context(|| format!("`{part}`: bad count"))?;
            Ok((spec.trim().parse::<AgentSpec>()?, count))
        })
        .collect()
}

/// Loads a game from a path, from `data` for relative paths, or by shipped
/// name.
pub fn resolve_game(spec: &str, data: Option<&Path>) -> Result<(String, GameTree)> {
    let direct = PathBuf::from(spec);
    let candidates = std::iter::once(direct.clone()).chain(data.map(|d| d.join(spec)));
    for path in candidates {
        if path.is_file() {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let g = load_game(&text).with_context(|| format!("parsing {}", path.display()))?;
            let title = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .parse::<GameId>()
                .map(|id| id.title().to_string())
                .unwrap_or_else(|_| g.name().to_string());
            return Ok((title, g));
        }
    }
    if let Ok(id) = spec.parse::<GameId>() {
        return Ok((id.title().to_string(), game(id)));
    }
    let stem_id = direct
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.parse::<GameId>().ok())
        .filter(|_| direct.parent().is_some_and(|p| p.ends_with("games")));
    if let Some(id) = stem_id {
        return Ok((id.title().to_string(), game(id)));
    }
    bail!("cannot read game `{spec}`: no such file or shipped game")
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Theorems(a) => cmd_theorems(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Serve(a) => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(a.port, a.out))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode> {
    let games: Vec<(String, GameTree)> = if a.games.is_empty() {
        GameId::ALL.iter().map(|&id| (id.title().to_string(), game(id))).collect()
    } else {
        a.games
            .iter()
            .map(|g| resolve_game(g, a.data.as_deref()))
            .collect::<Result<_>>()?
    };
    let reports: Vec<_> = games.iter().map(|(_, g)| solve(g)).collect();
    if a.json {
        let out: Vec<_> = games
            .iter()
            .zip(&reports)
            .map(|((_, g), r)| r.summary(g))
            .collect();
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        let rows: Vec<_> = games
            .iter()
            .zip(&reports)
            .map(|((t, g), r)| (t.clone(), g, r))
            .collect();
        println!("{}", render_table(&rows));
        for ((t, _), r) in games.iter().zip(&reports) {
            let outs = |o: &[efrlab_core::game::PathOutcome]| {
                o.iter()
                    .map(|o| format!("({},{})", o.payoff[0], o.payoff[1]))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            println!(
                "{t}: BI outcomes {}; EFR outcomes {}{}",
                outs(&r.bi.outcomes),
                outs(&r.efr.outcomes),
                if r.ties { "; relevant ties" } else { "" }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Counts from a batch of theorem checks.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct TheoremTally {
    pub games: usize,
    pub tied: usize,
    pub unique_matches: usize,
    pub unique_checked: usize,
    pub subset: usize,
    pub nonempty: usize,
    pub all_hold: usize,
    pub failing_seeds: Vec<u64>,
}

pub fn run_theorems(n: usize, cfg: &RandomGameConfig, seed: u64) -> Result<TheoremTally> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(1);
    let seeds: Vec<u64> = (0..n as u64).map(|i| seed.wrapping_add(i)).collect();
    let chunk = seeds.len().div_ceil(workers).max(1);
    let reports = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&sd| random_game(sd, cfg).map(|g| (sd, check_theorems(&g))))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("theorem worker panicked"))
            .collect::<Vec<_>>()
    });
    let mut t = TheoremTally::default();
    for r in reports {
        let (sd, r) = r?;
        t.games += 1;
        t.tied += r.ties as usize;
        if let Some(m) = r.unique_outcome_match {
            t.unique_checked += 1;
            t.unique_matches += m as usize;
        }
        t.subset += r.efr_subset_of_bi as usize;
        t.nonempty += r.efr_nonempty as usize;
        if r.holds() {
            t.all_hold += 1;
        } else {
            t.failing_seeds.push(sd);
        }
    }
    Ok(t)
}

fn cmd_theorems(a: TheoremArgs) -> Result<ExitCode> {
    let cfg = RandomGameConfig {
        depth: a.depth,
        forbid_relevant_ties: a.no_ties,
        payoff_max: a.payoff_max.unwrap_or(if a.no_ties { 9 } else { 3 }),
        ..Default::default()
    };
    let t = run_theorems(a.n, &cfg, a.seed)?;
    if a.no_ties {
        println!("{}/{} unique-outcome matches", t.unique_matches, t.games);
    } else {
        println!("{}/{} EFR outcomes inside BI outcomes", t.subset, t.games);
        println!("{}/{} EFR sets non-empty", t.nonempty, t.games);
        println!("{}/{} games with relevant ties", t.tied, t.games);
    }
    if t.failing_seeds.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failing seeds: {:?}", t.failing_seeds);
        Ok(ExitCode::FAILURE)
    }
}

fn schedule_summary(s: &OpponentSchedule) -> (String, bool) {
    let report = verify_schedule(s);
    let mut out = String::new();
    for (id, d) in &report.deviation {
        let _ = writeln!(
            out,
            "{:<9} deviations {}/{} (rate {:.3}){}",
            id.title(),
            d.deviations,
            d.rounds,
            d.realized_rate,
            if d.capable { "" } else { " [cannot deviate]" }
        );
    }
    for v in &report.violations {
        let _ = writeln!(out, "violation: {} round {}: {}", v.game, v.round, v.reason);
    }
    let _ = writeln!(out, "{} violations", report.violations.len());
    (out, report.is_clean())
}

fn cmd_schedule(a: ScheduleArgs) -> Result<ExitCode> {
    let schedule = match &a.verify {
        Some(path) => OpponentSchedule::from_json(
            &std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => {
            let cfg = OpponentConfig {
                deviation_rate: a.deviation_rate,
                rounds: a.rounds,
                ..OpponentConfig::default()
            };
            generate_schedule(&cfg, a.seed)?
        }
    };
    let (text, clean) = schedule_summary(&schedule);
    print!("{text}");
    if let Some(out) = &a.out {
        std::fs::write(out, schedule.to_json()).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(if clean { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let specs = parse_population(&a.agents)?;
    let opp = OpponentConfig {
        deviation_rate: a.deviation_rate,
        ..OpponentConfig::default()
    };
    let logs = simulate_population(&specs, &opp, a.practice, a.seed)?;
    let events = a.out.join("events");
    std::fs::create_dir_all(&events).with_context(|| format!("creating {}", events.display()))?;
    std::fs::write(a.out.join("trials.csv"), write_csv(&all_rows(&logs)))?;
    for l in &logs {
        std::fs::write(events.join(format!("{}.jsonl", l.participant)), &l.events)?;
    }
    std::fs::write(a.out.join("participants.json"), serde_json::to_string_pretty(&logs)?)?;
    println!(
        "{} participants, {} experimental trials written to {}",
        logs.len(),
        logs.iter().map(|l| l.rows.len()).sum::<usize>(),
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Text report of the first-node analytics over `rows`.
pub fn analysis_report(rows: &[ExportRow], thresholds: Thresholds) -> Result<String> {
    let grids = choice_grids(rows)?;
    let mut out = String::new();
    let people = grids.iter().map(|g| g.participant.as_str()).collect::<std::collections::BTreeSet<_>>();
    let _ = writeln!(out, "{} participants, {} trials", people.len(), rows.len());
    match group_test(rows) {
        Ok(t) => {
            let _ = writeln!(
                out,
                "group A played d in {}/{} reached trials, group B in {}/{}: z = {:.3}, p = {:.2}",
                t.successes[0], t.trials[0], t.successes[1], t.trials[1], t.z, t.p_value
            );
        }
        Err(e) => {
            let _ = writeln!(out, "group test skipped: {e}");
        }
    }
    for (x, y) in STANDARD_PAIRS {
        let r = compare_grids(&grids, x, y, thresholds)?;
        if r.compared() == 0 {
            continue;
        }
        let _ = writeln!(out, "\n{} vs {}:", x.title(), y.title());
        for s in r.sentences() {
            let _ = writeln!(out, "  {s}.");
        }
    }
    Ok(out)
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let rows = match &a.input {
        Some(path) => parse_export(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?,
        None => {
            let specs = parse_population(DEFAULT_POPULATION)?;
            eprintln!("no --input: simulating the default population (seed {})", a.seed);
            all_rows(&simulate_population(&specs, &OpponentConfig::default(), 0, a.seed)?)
        }
    };
    let thresholds = Thresholds {
        much: a.much,
        slight: a.slight,
    };
    let report = analysis_report(&rows, thresholds)?;
    print!("{report}");
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        let grids = choice_grids(&rows)?;
        std::fs::write(dir.join("grids.csv"), grids_to_csv(&grids))?;
        std::fs::write(dir.join("grids.svg"), grids_to_svg(&grids))?;
        let mut cmp = String::from("game_x,game_y,participant,freq_x,freq_y,reached_x,reached_y,class\n");
        for (x, y) in STANDARD_PAIRS {
            for c in compare_grids(&grids, x, y, thresholds)?.comparisons {
                let _ = writeln!(
                    cmp,
                    "{x},{y},{},{:.4},{:.4},{},{},{}",
                    c.participant, c.freq_x, c.freq_y, c.reached_x, c.reached_y, c.class
                );
            }
        }
        std::fs::write(dir.join("comparisons.csv"), cmp)?;
        std::fs::write(dir.join("summary.txt"), &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

