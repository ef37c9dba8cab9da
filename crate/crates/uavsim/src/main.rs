use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use uavsim::config::AlgorithmChoice;
use uavsim::{
    compare_report, load_config_file, run_experiment, run_probe, ExperimentConfig, HarnessError, OUTPUT_DIR_ENV,
};

#[derive(Parser)]
#[command(name = "uavsim", version, about = "UAV aerial radio unit trajectory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train or plan and write metrics, trajectories and plots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        algo: Option<Algo>,
        /// Run this seed only.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the throughput landscape over UAV position.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare runs listed in one or more manifests.
    Compare {
        #[arg(long)]
        out: PathBuf,
        /// Trailing window for the smoothed reward.
        #[arg(long, default_value_t = 50)]
        window: usize,
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Q,
    Sarsa,
    Vi,
    All,
}

impl From<Algo> for AlgorithmChoice {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Q => AlgorithmChoice::Qlearning,
            Algo::Sarsa => AlgorithmChoice::Sarsa,
            Algo::Vi => AlgorithmChoice::ValueIteration,
            Algo::All => AlgorithmChoice::All,
        }
    }
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<ExperimentConfig, HarnessError> {
    let mut config = load_config_file(path)?;
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        config.output_dir = dir.into();
    }
    if let Some(dir) = out {
        config.output_dir = dir;
    }
    Ok(config)
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run {
            config,
            algo,
            seed,
            out,
        } => {
            let mut config = load(&config, out)?;
            if let Some(algo) = algo {
                config.algorithm = algo.into();
            }
            if let Some(seed) = seed {
                config.seeds = vec![seed];
            }
            let manifest = run_experiment(&config)?;
            for run in &manifest.runs {
                println!(
                    "{} seed {}: {} episodes, greedy path {} steps ({:?})",
                    run.algorithm.name(),
                    run.seed,
                    run.metrics.len(),
                    run.path.len() - 1,
                    run.outcome
                );
            }
            if let Some(sel) = &manifest.selection {
                match sel.gamma_star {
                    Some(g) => println!("selected gamma {g}"),
                    None => eprintln!("warning: no gamma candidate settled; kept gamma {}", manifest.gamma),
                }
            }
            println!("wrote {}", manifest.path.display());
        }
        Command::Probe { config, out } => {
            let config = load(&config, Some(out))?;
            let (manifest, report) = run_probe(&config)?;
            let top = report.field[report.global_max];
            println!(
                "{} strict local maxima; global maximum {:.6} at ({}, {})",
                report.local_maxima.len(),
                top.value,
                top.x,
                top.y
            );
            println!("wrote {}", manifest.path.display());
        }
        Command::Compare { out, window, manifests } => {
            let c = compare_report(&manifests, &out, window)?;
            for a in &c.algorithms {
                println!(
                    "{}: {} runs, criterion reached in {}, smoothed reward {:.6}",
                    a.algorithm,
                    a.seeds.len(),
                    a.runs_reaching_criterion(),
                    a.final_smoothed_reward()
                );
            }
            println!("wrote {}", out.join(uavsim::compare::COMPARISON_FILE).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
