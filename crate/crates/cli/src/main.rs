//! `lightpath`: train a Q-learning agent to find least-time light paths
//! through layered media, query the ground-truth solvers, re-render the
//! figures, and sweep seeds.

mod config;
mod harness;
mod svg;

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;

use lightpath_core::{brute_force_optimum, fermat_continuous, DEFAULT_FERMAT_TOL};

use config::RunConfig;
use harness::{run_experiment, RunOutcome, CONVERGENCE_REL_TOL};

#[derive(Parser)]
#[command(
    name = "lightpath",
    version,
    about = "Q-learning the least-time light path through layered media"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// More detail on stdout (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Run the oracles and the training loop, writing enabled artifacts.
    Train(RunArgs),
    /// Solve the medium with both oracles and print the optima.
    Oracle(RunArgs),
    /// Re-render the SVG figures from a run's round log.
    Render(RunArgs),
    /// Train one run per seed and aggregate the convergence rate.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Dotted-path config override, e.g. --set agent.alpha=0.01 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; shorthand for --set outputs.directory=...
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Seeds to train, comma separated (e.g. --seeds 1,2,3).
    #[arg(long, required = true, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// How many experiments may run at once.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => cmd_train(&args, cli.verbose),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Render(args) => cmd_render(&args),
        Command::Sweep(args) => cmd_sweep(&args, cli.verbose),
    };
    if let Err(error) = result {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}

/// Loads the config, applies `--set` overrides, then `--out`.
fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut config = config::load_config(&args.config, &args.set)?;
    if let Some(out) = &args.out {
        config.outputs.directory = Some(out.clone());
    }
    Ok(config)
}

fn format_ints(values: &[i32]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(", "))
}

fn format_reals(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", inner.join(", "))
}

fn print_summary(outcome: &RunOutcome, verbose: u8) {
    let summary = &outcome.summary;
    println!(
        "discrete oracle:    {}  T = {:.6}",
        format_ints(&summary.oracle.discrete.state),
        summary.oracle.discrete.time
    );
    println!(
        "continuous oracle:  {}  T = {:.6}  (snell residual {:.2e})",
        format_reals(&summary.oracle.continuous.ys),
        summary.oracle.continuous.time,
        summary.oracle.continuous.snell_residual
    );
    if let Some(best) = summary.per_episode_best_time.last() {
        println!("final episode best: T = {best:.6}");
    }
    println!(
        "greedy extraction:  {}  T = {:.6}  [{}]",
        format_ints(&summary.greedy.state),
        summary.greedy.time,
        if summary.converged {
            "converged"
        } else {
            "not converged"
        }
    );
    if verbose > 0 {
        println!(
            "visited {} states, logged {} rounds",
            outcome.table.num_states(),
            outcome.records.len()
        );
        for (episode, best) in summary.per_episode_best_time.iter().enumerate() {
            println!("  episode {episode:>3}: best T = {best:.6}");
        }
    }
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
    println!("duration: {:.3} s", summary.duration.as_secs_f64());
}

fn cmd_train(args: &RunArgs, verbose: u8) -> Result<()> {
    let config = load(args)?;
    let outcome = run_experiment(&config)?;
    print_summary(&outcome, verbose);
    Ok(())
}

fn cmd_oracle(args: &RunArgs) -> Result<()> {
    let config = load(args)?;
    let experiment = config.build()?;
    let discrete = brute_force_optimum(&experiment.medium)?;
    let continuous = fermat_continuous(&experiment.medium, DEFAULT_FERMAT_TOL)?;
    println!(
        "discrete oracle:    {}  T = {:.6}",
        format_ints(discrete.state.ys()),
        discrete.time
    );
    println!(
        "continuous oracle:  {}  T = {:.6}",
        format_reals(&continuous.ys),
        continuous.time
    );
    println!("snell residual:     {:.2e}", continuous.snell_residual);
    println!(
        "rounds to discrete: {}",
        format_ints(continuous.rounded_state().ys())
    );
    Ok(())
}

fn cmd_render(args: &RunArgs) -> Result<()> {
    let config = load(args)?;
    let experiment = config.build()?;
    let directory = config
        .outputs
        .directory
        .as_ref()
        .ok_or_else(|| anyhow!("outputs.directory: required to locate the run (or pass --out)"))?;
    let log_path = directory.join("rounds.csv");
    let file = fs::File::open(&log_path).with_context(|| {
        format!(
            "opening {} (train with outputs.round_log enabled first)",
            log_path.display()
        )
    })?;
    let records = harness::parse_round_csv(BufReader::new(file))
        .with_context(|| format!("parsing {}", log_path.display()))?;
    let discrete = brute_force_optimum(&experiment.medium)?;

    let selected = config.figure_episodes();
    let selected_records: Vec<_> = records
        .iter()
        .filter(|record| selected.binary_search(&record.episode).is_ok())
        .cloned()
        .collect();
    let states = harness::episode_best_states(&selected_records, &selected, &experiment.s_ini);

    let paths_svg = directory.join("paths.svg");
    svg::render_path_svg(&experiment.medium, &states, &discrete.state, &paths_svg)?;
    println!("wrote {}", paths_svg.display());
    let convergence_svg = directory.join("convergence.svg");
    svg::render_convergence_svg(&selected_records, discrete.time, &convergence_svg)?;
    println!("wrote {}", convergence_svg.display());
    Ok(())
}

/// One row of the sweep aggregate.
#[derive(Debug, Serialize)]
struct SeedOutcome {
    seed: u64,
    greedy_time: f64,
    final_episode_best_time: Option<f64>,
    converged: bool,
}

#[derive(Debug, Serialize)]
struct SweepAggregate {
    oracle_time: f64,
    convergence_rel_tol: f64,
    results: Vec<SeedOutcome>,
    converged_count: usize,
    total: usize,
    convergence_rate: f64,
}

fn cmd_sweep(args: &SweepArgs, verbose: u8) -> Result<()> {
    let base = load(&args.run)?;
    base.build()?; // fail fast on a bad config before spawning anything
    let directory = base
        .outputs
        .directory
        .clone()
        .ok_or_else(|| anyhow!("outputs.directory: required for a sweep (or pass --out)"))?;

    let mut seeds = args.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();

    // Pull seeds off a shared counter so at most --jobs run at once; each
    // run owns its RNG and its seed-<n> subdirectory.
    let jobs = args.jobs.clamp(1, seeds.len());
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunOutcome>>>> =
        Mutex::new((0..seeds.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let position = next.fetch_add(1, Ordering::Relaxed);
                let Some(&seed) = seeds.get(position) else {
                    break;
                };
                let mut child = base.clone();
                child.agent.seed = seed;
                child.outputs.directory = Some(directory.join(format!("seed-{seed}")));
                let outcome = run_experiment(&child);
                slots.lock().unwrap()[position] = Some(outcome);
            });
        }
    });

    let mut results = Vec::with_capacity(seeds.len());
    let mut failures = 0usize;
    let mut oracle_time = None;
    for (seed, slot) in seeds.iter().zip(slots.into_inner().unwrap()) {
        match slot.expect("every seed slot filled") {
            Ok(outcome) => {
                let summary = &outcome.summary;
                oracle_time.get_or_insert(summary.oracle.discrete.time);
                println!(
                    "seed {seed}: greedy T = {:.6}  final episode best T = {}  [{}]",
                    summary.greedy.time,
                    summary
                        .per_episode_best_time
                        .last()
                        .map(|t| format!("{t:.6}"))
                        .unwrap_or_else(|| "n/a".into()),
                    if summary.converged {
                        "converged"
                    } else {
                        "not converged"
                    }
                );
                if verbose > 0 {
                    for path in &outcome.written {
                        println!("  wrote {}", path.display());
                    }
                }
                results.push(SeedOutcome {
                    seed: *seed,
                    greedy_time: summary.greedy.time,
                    final_episode_best_time: summary.per_episode_best_time.last().copied(),
                    converged: summary.converged,
                });
            }
            Err(error) => {
                failures += 1;
                eprintln!("seed {seed}: failed: {error:#}");
            }
        }
    }

    if let Some(oracle_time) = oracle_time {
        let converged_count = results.iter().filter(|r| r.converged).count();
        let total = results.len();
        let aggregate = SweepAggregate {
            oracle_time,
            convergence_rel_tol: CONVERGENCE_REL_TOL,
            converged_count,
            total,
            convergence_rate: converged_count as f64 / total as f64,
            results,
        };
        let path = directory.join("sweep.json");
        let mut text = serde_json::to_string_pretty(&aggregate)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!(
            "convergence rate: {converged_count}/{total} within {:.1}% of T = {oracle_time:.6}",
            CONVERGENCE_REL_TOL * 100.0
        );
        println!("wrote {}", path.display());
    }
    if failures > 0 {
        bail!("{failures} of {} seeds failed", seeds.len());
    }
    Ok(())
}
