//! Experiment orchestration: one directory per (algorithm, seed) plus a
//! manifest listing every file written.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uavsim_core::agents::{
    greedy_trajectory, run_agent, select_discount_factor, smoothed_rewards, Algorithm, DiscountSelection,
    RolloutOutcome, RunMetrics,
};
use uavsim_core::environment::Environment;
use uavsim_core::objective::{nonconvexity_probe, two_cluster_layout, NetworkLayout, ProbeReport};

use crate::artifacts::{FieldRow, ManifestRow, MetricsRow, OutputSet, SelectionRow, TrajectoryRow, MANIFEST_FILE};
use crate::config::{ExperimentConfig, Scenario};
use crate::error::HarnessError;
use crate::svg;

/// Result of one (algorithm, seed) run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub metrics: RunMetrics,
    /// Greedy path from the start, as `(col, row)`; stage and rail on the
    /// ladder.
    pub path: Vec<(usize, usize)>,
    pub outcome: RolloutOutcome,
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub path: PathBuf,
    pub rows: Vec<ManifestRow>,
    pub runs: Vec<RunRecord>,
    /// Discount factor the runs used.
    pub gamma: f64,
    /// Set when discount selection ran.
    pub selection: Option<DiscountSelection>,
}

struct Layout {
    cols: usize,
    rows: usize,
    start: (usize, usize),
    terminal: (usize, usize),
    /// Every cell in the last column is terminal; the plot marks the one
    /// the path ends in.
    terminal_column: bool,
}

struct ManifestWriter {
    rows: Vec<ManifestRow>,
    config_hash: String,
    env_hash: String,
    delta: f64,
}

impl ManifestWriter {
    fn add(&mut self, path: &str, kind: &str, algorithm: Option<Algorithm>, seed: Option<u64>) {
        self.rows.push(ManifestRow {
            path: path.to_string(),
            kind: kind.to_string(),
            algorithm: algorithm.map(|a| a.name().to_string()).unwrap_or_default(),
            seed,
            config_hash: self.config_hash.clone(),
            env_hash: self.env_hash.clone(),
            delta: self.delta,
        });
    }
}

/// Runs every configured (algorithm, seed) pair and writes the artifacts
/// under `config.output_dir`. On failure nothing written by this call is
/// left behind.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Manifest, HarnessError> {
    config.validate()?;
    match config.scenario {
        Scenario::Gridworld => {
            let env = config.grid_env()?;
            let grid = env.grid().clone();
            let layout = Layout {
                cols: grid.cols,
                rows: grid.rows,
                start: (grid.start.col, grid.start.row),
                terminal: (grid.terminal.col, grid.terminal.row),
                terminal_column: false,
            };
            run_on(config, &env, &layout, |s| {
                let cell = grid.cell_at(s);
                (cell.col, cell.row)
            })
        }
        Scenario::Ladder => {
            let env = config.ladder_mdp()?;
            let at = env.clone();
            let (_, start_rail) = at.state_at(env.start_state());
            let layout = Layout {
                cols: env.stages(),
                rows: 2,
                start: (0, start_rail.index()),
                terminal: (env.stages() - 1, start_rail.index()),
                terminal_column: true,
            };
            run_on(config, &env, &layout, move |s| {
                let (stage, rail) = at.state_at(s);
                (stage, rail.index())
            })
        }
    }
}

fn run_on<E: Environment>(
    config: &ExperimentConfig,
    env: &E,
    layout: &Layout,
    cell_of: impl Fn(usize) -> (usize, usize),
) -> Result<Manifest, HarnessError> {
    let mut out = OutputSet::create(&config.output_dir)?;
    let mut manifest = ManifestWriter {
        rows: Vec::new(),
        config_hash: config.hash(),
        env_hash: config.environment_hash(),
        delta: config.learning.delta,
    };

    let mut gamma = config.learning.gamma;
    let mut selection = None;
    if config.learning.select_gamma {
        let base = config.learning_config(config.seeds[0]);
        let sel = select_discount_factor(env, &base, Algorithm::ValueIteration)?;
        let rows: Vec<SelectionRow> = sel
            .traces
            .iter()
            .flat_map(|t| {
                (0..t.ratios.len()).map(move |i| SelectionRow {
                    gamma: t.gamma,
                    episode: i + 1,
                    q0: t.q0[i],
                    average_reward: t.average_reward[i],
                    q0_ar_ratio: t.ratios[i],
                })
            })
            .collect();
        out.write_csv("discount_selection.csv", &rows)?;
        manifest.add(
            "discount_selection.csv",
            "discount_selection",
            Some(Algorithm::ValueIteration),
            Some(base.seed),
        );
        if let Some(g) = sel.gamma_star {
            gamma = g;
        }
        selection = Some(sel);
    }

    let mut runs = Vec::new();
    for algorithm in config.algorithm.algorithms() {
        for &seed in &config.seeds {
            let mut learning = config.learning_config(seed);
            learning.gamma = gamma;
            let run = run_agent(env, &learning, algorithm)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rollout = greedy_trajectory(&run.table, env, learning.max_steps_per_episode, &mut rng)?;
            let mut path = vec![cell_of(env.start_state())];
            path.extend(rollout.trace.steps().iter().map(|s| cell_of(s.next_state)));

            let dir = format!("{}/seed_{seed}", algorithm.name());
            let name = |file: &str| format!("{dir}/{file}");
            out.write_csv(&name("metrics.csv"), &MetricsRow::from_metrics(&run.metrics))?;
            manifest.add(&name("metrics.csv"), "metrics", Some(algorithm), Some(seed));

            let rows: Vec<TrajectoryRow> = path
                .iter()
                .enumerate()
                .map(|(step, &(col, row))| TrajectoryRow { step, col, row })
                .collect();
            out.write_csv(&name("trajectory.csv"), &rows)?;
            manifest.add(&name("trajectory.csv"), "trajectory", Some(algorithm), Some(seed));

            for (file, text) in plots(algorithm, seed, &run.metrics, config, layout, &path) {
                out.write_text(&name(file), &text)?;
                manifest.add(&name(file), "plot", Some(algorithm), Some(seed));
            }
            runs.push(RunRecord {
                algorithm,
                seed,
                metrics: run.metrics,
                path,
                outcome: rollout.outcome,
            });
        }
    }

    if let Some(network) = config.network_layout()? {
        write_probe(&mut out, &mut manifest, config, &network)?;
    }

    let path = out.path(MANIFEST_FILE)?;
    crate::artifacts::write_csv(&path, &manifest.rows)?;
    out.commit();
    Ok(Manifest {
        path,
        rows: manifest.rows,
        runs,
        gamma,
        selection,
    })
}

fn plots(
    algorithm: Algorithm,
    seed: u64,
    metrics: &RunMetrics,
    config: &ExperimentConfig,
    layout: &Layout,
    path: &[(usize, usize)],
) -> Vec<(&'static str, String)> {
    let average: Vec<f64> = metrics.episodes.iter().map(|e| e.average_reward).collect();
    let smoothed = smoothed_rewards(metrics, config.learning.smoothing_window);
    let ratios = metrics.ratios();
    let tag = format!("{} seed {seed}", algorithm.name());
    let terminal = match path.last() {
        Some(&end) if layout.terminal_column && end.0 + 1 == layout.cols => end,
        _ => layout.terminal,
    };
    vec![
        (
            "avg_reward.svg",
            svg::line_plot(
                &format!("Average reward, {tag}"),
                "episode",
                "reward",
                &[
                    svg::Series {
                        label: "running mean",
                        values: &average,
                    },
                    svg::Series {
                        label: "trailing window",
                        values: &smoothed,
                    },
                ],
                None,
                None,
            ),
        ),
        (
            "q0_ratio.svg",
            svg::line_plot(
                &format!("|Q0 - AR| / |Q0 + AR|, {tag}"),
                "episode",
                "ratio",
                &[svg::Series {
                    label: "ratio",
                    values: &ratios,
                }],
                Some(config.learning.delta),
                Some((0.0, 2.0)),
            ),
        ),
        (
            "trajectory.svg",
            svg::trajectory_plot(
                &format!("Greedy trajectory, {tag}"),
                layout.cols,
                layout.rows,
                path,
                layout.start,
                terminal,
            ),
        ),
    ]
}

fn write_probe(
    out: &mut OutputSet,
    manifest: &mut ManifestWriter,
    config: &ExperimentConfig,
    network: &NetworkLayout,
) -> Result<ProbeReport, HarnessError> {
    let report = nonconvexity_probe(
        network,
        &config.position_box(),
        config.probe.resolution,
        &config.channel_params(),
    )?;
    let field: Vec<FieldRow> = report
        .field
        .iter()
        .map(|p| FieldRow {
            x: p.x,
            y: p.y,
            value: p.value,
        })
        .collect();
    out.write_csv("objective_field.csv", &field)?;
    manifest.add("objective_field.csv", "objective_field", None, None);
    let maxima: Vec<FieldRow> = report.local_maxima.iter().map(|&k| field[k]).collect();
    out.write_csv("local_maxima.csv", &maxima)?;
    manifest.add("local_maxima.csv", "local_maxima", None, None);
    let values: Vec<f64> = field.iter().map(|f| f.value).collect();
    let title = format!(
        "Throughput at {} m, {} strict local maxima",
        report.altitude_m,
        maxima.len()
    );
    out.write_text(
        "objective_field.svg",
        &svg::heatmap(&title, report.resolution, &values, &report.local_maxima),
    )?;
    manifest.add("objective_field.svg", "plot", None, None);
    Ok(report)
}

/// Scans the throughput landscape of the configured layout, or of the
/// built-in two-cluster layout when none is configured.
pub fn run_probe(config: &ExperimentConfig) -> Result<(Manifest, ProbeReport), HarnessError> {
    config.validate()?;
    let network = config.network_layout()?.unwrap_or_else(two_cluster_layout);
    let mut out = OutputSet::create(&config.output_dir)?;
    let mut manifest = ManifestWriter {
        rows: Vec::new(),
        config_hash: config.hash(),
        env_hash: config.environment_hash(),
        delta: config.learning.delta,
    };
    let report = write_probe(&mut out, &mut manifest, config, &network)?;
    let path = out.path(MANIFEST_FILE)?;
    crate::artifacts::write_csv(&path, &manifest.rows)?;
    out.commit();
    let manifest = Manifest {
        path,
        rows: manifest.rows,
        runs: Vec::new(),
        gamma: config.learning.gamma,
        selection: None,
    };
    Ok((manifest, report))
}
