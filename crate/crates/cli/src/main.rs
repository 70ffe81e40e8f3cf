use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nanosim_cli::analysis::{self, AnalysisConfig};
use nanosim_cli::experiment::{apply_param, parse_assignment, DEFAULT_TRIALS};
use nanosim_cli::{presets, run_experiment, ExperimentKind, ExperimentSpec, RunOptions};
use nanosim_core::{Model, RunConfig};

#[derive(Parser)]
#[command(name = "nanosim", version, about = "Chemotactic nano-agent swarm simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Passive,
    Active,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalysisArg {
    Progress,
    Distances,
    Bound,
}

#[derive(clap::Args)]
struct Execution {
    /// Trials per sweep point.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed; trial k uses master XOR k.
    #[arg(long, env = "NANOSIM_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the per-event JSONL log.
    #[arg(long)]
    no_events: bool,
    /// Suppress the trial counter.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials of one configuration.
    Simulate {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// JSON run configuration (snake_case keys, SI units).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        exec: Execution,
    },
    /// Evaluate progress curves, notable distances or the hitting-time bound.
    Analyze {
        #[arg(value_enum)]
        what: AnalysisArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a preset or a custom experiment description.
    Experiment {
        #[arg(long)]
        preset: String,
        /// Experiment description for `--preset custom`.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a base parameter, e.g. `--set b=1e12`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        exec: Execution,
    },
    /// List the built-in presets.
    Presets,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn execute(mut spec: ExperimentSpec, exec: Execution) -> Result<()> {
    if let Some(t) = exec.trials {
        spec.trials = t;
    }
    let workers = exec
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = exec.out.unwrap_or_else(|| PathBuf::from("out").join(&spec.name));
    let opts = RunOptions {
        out: out.clone(),
        workers,
        master_seed: exec.seed,
        write_events: !exec.no_events,
        progress: !exec.quiet,
    };
    let outcome = run_experiment(&spec, &opts)?;
    println!("wrote {} files to {}", outcome.files.len(), out.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { model, config, exec } => {
            let mut base: RunConfig = read_json(&config)?;
            base.model = match model {
                ModelArg::Passive => Model::Passive,
                ModelArg::Active => Model::Active,
            };
            let spec: ExperimentSpec = serde_json::from_value(serde_json::json!({
                "name": "simulate",
                "trials": DEFAULT_TRIALS,
                "base": base,
            }))?;
            execute(spec, exec)
        }
        Command::Analyze { what, config, out } => {
            let cfg: AnalysisConfig = read_json(&config)?;
            let files = match what {
                AnalysisArg::Progress => analysis::write_progress(&cfg, &out)?,
                AnalysisArg::Distances => analysis::write_distances(&cfg, &out)?,
                AnalysisArg::Bound => analysis::write_bound(&cfg, &out)?,
            };
            println!("wrote {} files to {}", files.len(), out.display());
            Ok(())
        }
        Command::Experiment {
            preset,
            config,
            set,
            exec,
        } => {
            let mut spec = match (preset.as_str(), &config) {
                ("custom", Some(path)) => read_json::<ExperimentSpec>(path)?,
                (_, Some(_)) => anyhow::bail!("--config is only used with --preset custom"),
                (name, None) => presets::preset(name)?,
            };
            for s in &set {
                let (k, v) = parse_assignment(s)?;
                apply_param(&mut spec.base, &k, v)?;
            }
            if spec.kind == ExperimentKind::Analysis && exec.trials.is_some() {
                eprintln!("note: --trials has no effect on analysis presets");
            }
            execute(spec, exec)
        }
        Command::Presets => {
            for (name, text) in presets::PRESETS {
                let spec: ExperimentSpec = serde_json::from_str(text)?;
                println!("{name:7} {}", spec.description);
            }
            println!("{:7} experiment description read from --config", "custom");
            Ok(())
        }
    }
}
