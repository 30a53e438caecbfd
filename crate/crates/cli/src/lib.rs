//! Command-line pipeline around `evoqnn-core`: training, the conventional
//! baseline, frozen-pool inference, selection, backend comparison and a
//! markdown report, all reading and writing one run directory.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{CompareInputs, InferInputs};
use crate::config::{BackendKind, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "evoqnn",
    version,
    about = "Evolutionary training and selection of weight-shared quantum circuits"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override any configuration key, e.g. `--set generations=3`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run directory for all artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub backend: Option<BackendKind>,
    #[arg(long, global = true)]
    pub shots: Option<u32>,
    #[arg(long = "noise-p", global = true)]
    pub noise_p: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Use Gaussian blobs instead of MNIST.
    #[arg(long, global = true)]
    pub synthetic: bool,
    #[arg(long = "top-k", global = true)]
    pub top_k: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve and train the shared parameter pool.
    Train,
    /// Train the full macroCircuit conventionally.
    Baseline,
    /// Evolve microCircuits against a frozen pool.
    Infer {
        #[arg(long)]
        pool: Option<PathBuf>,
        /// JSON list of fitness records whose chromosomes seed the search.
        #[arg(long)]
        population: Option<PathBuf>,
        #[arg(long)]
        pca: Option<PathBuf>,
    },
    /// Pick the top-k distinct microCircuits of a ranked population.
    Select {
        #[arg(long)]
        ranked: Option<PathBuf>,
    },
    /// GA-driven inference with both pools on every backend.
    CompareBackends {
        #[arg(long = "ga-pool")]
        ga_pool: Option<PathBuf>,
        #[arg(long = "regular-pool")]
        regular_pool: Option<PathBuf>,
        #[arg(long)]
        population: Option<PathBuf>,
        #[arg(long)]
        pca: Option<PathBuf>,
    },
    /// Render `report.md` from the run directory's manifest.
    Report,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            set: self.set.clone(),
            seed: self.seed,
            out: self.out.clone(),
            backend: self.backend,
            shots: self.shots,
            noise_p: self.noise_p,
            threads: self.threads,
            synthetic: self.synthetic,
            top_k: self.top_k,
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let overrides = cli.common.overrides();
    let config_path = cli.common.config.as_deref();
    // select and report touch no data, so they skip the data checks
    let config = match cli.command {
        Command::Select { .. } | Command::Report => {
            let c = RunConfig::resolve(config_path, &overrides)?;
            c.validate_model()?;
            c
        }
        _ => RunConfig::load(config_path, &overrides)?,
    };
    with_threads(config.threads, || -> anyhow::Result<()> {
        match cli.command {
            Command::Train => {
                let outcome = commands::cmd_train(&config)?;
                let best = outcome
                    .final_population
                    .iter()
                    .map(|r| r.fitness)
                    .fold(f64::NEG_INFINITY, f64::max);
                println!(
                    "trained pool revision {}, best final fitness {best:.4}",
                    outcome.pool.revision()
                );
            }
            Command::Baseline => {
                let (_, accuracy) = commands::cmd_baseline(&config)?;
                println!("full macroCircuit test accuracy {accuracy:.4}");
            }
            Command::Infer { pool, population, pca } => {
                commands::cmd_infer(&config, &InferInputs { pool, population, pca })?;
            }
            Command::Select { ranked } => {
                commands::cmd_select(&config, ranked.as_deref())?;
            }
            Command::CompareBackends {
                ga_pool,
                regular_pool,
                population,
                pca,
            } => {
                let rows = commands::cmd_compare_backends(
                    &config,
                    &CompareInputs {
                        ga_pool,
                        regular_pool,
                        population,
                        pca,
                    },
                )?;
                for r in rows {
                    println!(
                        "{:<6} ga {:.4}  regular {:.4}  delta {:+.4}",
                        r.backend.as_str(),
                        r.ga_best,
                        r.regular_best,
                        r.delta
                    );
                }
            }
            Command::Report => {
                report::cmd_report(&config.out)?;
                println!("wrote {}", config.out.join(artifacts::REPORT).display());
            }
        }
        Ok(())
    })?
}
