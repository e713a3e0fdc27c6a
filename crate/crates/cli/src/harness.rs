//! Experiment orchestration: run the oracles and the training loop, keep
//! the per-round log, extract the learned path, and persist every enabled
//! artifact.
//!
//! Every artifact is a pure function of the run configuration (seed
//! included): rerunning a config byte-identically reproduces the CSV, the
//! summary, the Q-table dump, and the figures. The only nondeterministic
//! quantity, wall-clock duration, lives on [`RunSummary`] for display but
//! is deliberately kept out of the persisted JSON.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use lightpath_core::{
    brute_force_optimum, fermat_continuous, greedy_state, run_episode, seeded_rng,
    InterfaceState, MoveAction, QTable, RoundRecord, DEFAULT_FERMAT_TOL,
};

use crate::config::RunConfig;
use crate::svg;

/// A greedy path within 0.5% of the exhaustive optimum counts as converged.
pub const CONVERGENCE_REL_TOL: f64 = 0.005;

/// Step cap for greedy policy extraction; generous next to any plausible
/// distance across the grid.
pub const GREEDY_STEP_CAP: u32 = 10_000;

/// Round-log header; one row per training round follows.
pub const CSV_HEADER: &str = "episode,round,y_coords,action,time_T,r_score,reward,best_T";

/// Everything worth keeping from a finished run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    /// The exact configuration that produced this run.
    pub config: RunConfig,
    pub oracle: OracleSummary,
    /// Best (least) time reached in each episode, in episode order.
    pub per_episode_best_time: Vec<f64>,
    /// Where the learned policy walks from s_ini, and how fast it is.
    pub greedy: GreedySummary,
    /// Whether the greedy time is within [`CONVERGENCE_REL_TOL`] of the
    /// exhaustive optimum.
    pub converged: bool,
    /// Shown on stdout only: serializing it would break byte-identical
    /// reruns.
    #[serde(skip)]
    pub duration: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub discrete: DiscreteOracleSummary,
    pub continuous: ContinuousOracleSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteOracleSummary {
    pub state: Vec<i32>,
    pub time: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuousOracleSummary {
    pub ys: Vec<f64>,
    pub time: f64,
    pub snell_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedySummary {
    pub state: Vec<i32>,
    pub time: f64,
}

/// A finished run: the summary plus the raw material behind it.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub records: Vec<RoundRecord>,
    pub table: QTable,
    /// Artifacts written, in write order.
    pub written: Vec<PathBuf>,
}

/// Runs the oracles and the full training loop for a config, writes every
/// enabled artifact, and returns the summary with the raw records.
///
/// One RNG stream and one Q-table persist across all episodes, so the
/// whole run is deterministic in the seed.
pub fn run_experiment(config: &RunConfig) -> Result<RunOutcome> {
    let experiment = config.build()?;
    let started = Instant::now();

    let discrete = brute_force_optimum(&experiment.medium)?;
    let continuous = fermat_continuous(&experiment.medium, DEFAULT_FERMAT_TOL)?;

    let t_ini = experiment.medium.path_time(&experiment.s_ini)?;
    let mut table = QTable::new(experiment.medium.num_interfaces());
    let mut rng = seeded_rng(experiment.agent.seed);
    let total_rounds =
        experiment.agent.episodes as usize * experiment.agent.rounds_per_episode as usize;
    let mut records = Vec::with_capacity(total_rounds);
    let mut per_episode_best_time = Vec::with_capacity(experiment.agent.episodes as usize);
    for episode in 0..experiment.agent.episodes {
        let episode_records = run_episode(
            &experiment.medium,
            experiment.scale,
            &mut table,
            &experiment.agent,
            &experiment.s_ini,
            episode,
            &mut rng,
        )?;
        per_episode_best_time.push(
            episode_records
                .last()
                .map(|record| record.best_time)
                .unwrap_or(t_ini),
        );
        records.extend(episode_records);
    }

    let (greedy, greedy_time) =
        greedy_state(&experiment.medium, &table, &experiment.s_ini, GREEDY_STEP_CAP)?;
    let converged = greedy_time <= discrete.time * (1.0 + CONVERGENCE_REL_TOL);

    let summary = RunSummary {
        config: config.clone(),
        oracle: OracleSummary {
            discrete: DiscreteOracleSummary {
                state: discrete.state.ys().to_vec(),
                time: discrete.time,
            },
            continuous: ContinuousOracleSummary {
                ys: continuous.ys.clone(),
                time: continuous.time,
                snell_residual: continuous.snell_residual,
            },
        },
        per_episode_best_time,
        greedy: GreedySummary {
            state: greedy.ys().to_vec(),
            time: greedy_time,
        },
        converged,
        duration: started.elapsed(),
    };

    let written = write_artifacts(config, &summary, &records, &table)?;
    Ok(RunOutcome {
        summary,
        records,
        table,
        written,
    })
}

/// Writes whichever artifacts the config enables; returns the paths.
fn write_artifacts(
    config: &RunConfig,
    summary: &RunSummary,
    records: &[RoundRecord],
    table: &QTable,
) -> Result<Vec<PathBuf>> {
    let outputs = &config.outputs;
    let any_enabled = outputs.round_log
        || outputs.summary
        || outputs.q_table
        || outputs.path_svg
        || outputs.convergence_svg;
    if !any_enabled {
        return Ok(Vec::new());
    }
    let directory = outputs.directory.as_ref().ok_or_else(|| {
        anyhow!("outputs.directory: required while any artifact is enabled (or pass --out)")
    })?;
    fs::create_dir_all(directory)
        .with_context(|| format!("creating {}", directory.display()))?;

    let mut written = Vec::new();
    if outputs.round_log {
        let path = directory.join("rounds.csv");
        let file = fs::File::create(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        let mut writer = io::BufWriter::new(file);
        write_round_csv(&mut writer, records)
            .and_then(|_| writer.flush())
            .with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    if outputs.summary {
        let path = directory.join("summary.json");
        let mut text = serde_json::to_string_pretty(summary)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    if outputs.q_table {
        let path = directory.join("qtable.json");
        #[derive(Serialize)]
        struct Row<'a> {
            state: &'a [i32],
            q: &'a [f64],
        }
        let rows: Vec<Row<'_>> = table
            .iter()
            .map(|(state, q)| Row { state: state.ys(), q })
            .collect();
        let mut text = serde_json::to_string_pretty(&rows)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    if outputs.path_svg || outputs.convergence_svg {
        let experiment = config.build()?;
        let selected = config.figure_episodes();
        // `render` rebuilds the figures from rounds.csv, so draw them from
        // the log's 6-significant-digit floats too; otherwise pixel rounding
        // would differ between a run and its re-render.
        let mut log = Vec::new();
        write_round_csv(&mut log, records)?;
        let records = parse_round_csv(log.as_slice())?;
        if outputs.path_svg {
            let path = directory.join("paths.svg");
            let states = episode_best_states(&records, &selected, &experiment.s_ini);
            let oracle = InterfaceState::new(summary.oracle.discrete.state.clone());
            svg::render_path_svg(&experiment.medium, &states, &oracle, &path)?;
            written.push(path);
        }
        if outputs.convergence_svg {
            let path = directory.join("convergence.svg");
            let selected_records: Vec<RoundRecord> = records
                .iter()
                .filter(|record| selected.binary_search(&record.episode).is_ok())
                .cloned()
                .collect();
            svg::render_convergence_svg(&selected_records, summary.oracle.discrete.time, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// The least-time path each selected episode found (falling back to the
/// start state for an episode that never improved on it), in episode order.
pub fn episode_best_states(
    records: &[RoundRecord],
    episodes: &[u32],
    s_ini: &InterfaceState,
) -> Vec<InterfaceState> {
    episodes
        .iter()
        .filter_map(|&episode| {
            let rounds = records.iter().filter(|r| r.episode == episode);
            let mut best: Option<&RoundRecord> = None;
            for record in rounds {
                let improves = match best {
                    None => true,
                    Some(current) => record.time < current.time,
                };
                if improves {
                    best = Some(record);
                }
            }
            let best = best?;
            // best_time folds in the start state; if nothing beat it, the
            // episode's best path is still the starting one.
            if best.time > best.best_time {
                return Some(s_ini.clone());
            }
            Some(best.state_after.clone())
        })
        .collect()
}

/// Writes the round log: the exact [`CSV_HEADER`] and one row per round,
/// floats with 6 significant digits, crossing heights joined by `;`.
pub fn write_round_csv<W: Write>(mut destination: W, records: &[RoundRecord]) -> io::Result<()> {
    writeln!(destination, "{CSV_HEADER}")?;
    for record in records {
        let mut coords = String::new();
        for (i, y) in record.state_after.ys().iter().enumerate() {
            if i > 0 {
                coords.push(';');
            }
            coords.push_str(&y.to_string());
        }
        writeln!(
            destination,
            "{},{},{},{},{},{},{},{}",
            record.episode,
            record.round,
            coords,
            record.action,
            format_sig(record.time),
            format_sig(record.r_score),
            format_sig(record.reward),
            format_sig(record.best_time),
        )?;
    }
    Ok(())
}

/// Six significant digits, scientific: enough to round-trip the run's
/// story, small enough to keep 30k-row logs diffable.
fn format_sig(value: f64) -> String {
    format!("{value:.5e}")
}

/// Parses a file produced by [`write_round_csv`].
pub fn parse_round_csv<R: BufRead>(source: R) -> Result<Vec<RoundRecord>> {
    let mut lines = source.lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("empty round log"))?
        .context("reading round log")?;
    if header != CSV_HEADER {
        bail!("unexpected round-log header {header:?}");
    }
    let mut records = Vec::new();
    for (number, line) in lines.enumerate() {
        let line = line.context("reading round log")?;
        if line.is_empty() {
            continue;
        }
        let parse = |record: &str| -> Result<RoundRecord> {
            let mut fields = record.split(',');
            let mut next = || fields.next().ok_or_else(|| anyhow!("missing field"));
            let episode = next()?.parse::<u32>()?;
            let round = next()?.parse::<u32>()?;
            let ys = next()?
                .split(';')
                .map(|y| y.parse::<i32>())
                .collect::<std::result::Result<Vec<i32>, _>>()?;
            let action = next()?
                .parse::<MoveAction>()
                .map_err(|e| anyhow!("{e}"))?;
            let time = next()?.parse::<f64>()?;
            let r_score = next()?.parse::<f64>()?;
            let reward = next()?.parse::<f64>()?;
            let best_time = next()?.parse::<f64>()?;
            if fields.next().is_some() {
                bail!("trailing fields");
            }
            Ok(RoundRecord {
                episode,
                round,
                state_after: InterfaceState::new(ys),
                action,
                time,
                r_score,
                reward,
                best_time,
            })
        };
        let record = parse(&line)
            .with_context(|| format!("round log line {}: {line:?}", number + 2))?;
        records.push(record);
    }
    Ok(records)
}
