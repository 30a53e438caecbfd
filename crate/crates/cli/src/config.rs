//! Run configuration: one flat TOML document, overridden by `--set key=value`
//! pairs and then by the dedicated command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use evoqnn_core::ga::GaConfig;
use evoqnn_core::model::Optimizer;
use evoqnn_core::rng::{derive_seed, tag};
use evoqnn_core::sim::{DEFAULT_NOISE_P, DEFAULT_SHOTS, MAX_QUBITS};
use evoqnn_core::{AggregationPolicy, BackendConfig, GeneBounds, TrainConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Exact,
    Shots,
    Noisy,
}

impl BackendKind {
    pub const ALL: [BackendKind; 3] = [BackendKind::Exact, BackendKind::Shots, BackendKind::Noisy];

    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Exact => "exact",
            BackendKind::Shots => "shots",
            BackendKind::Noisy => "noisy",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    #[default]
    Adam,
}

/// Every key is optional in the TOML document; missing keys take these
/// defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_qubits: usize,
    /// Original MNIST digit ids (or blob indices with `synthetic`).
    pub classes: Vec<u8>,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Directory holding the four MNIST IDX files.
    pub data_dir: Option<PathBuf>,
    pub synthetic: bool,
    pub synthetic_spread: f64,

    pub population_size: usize,
    pub generations: usize,
    pub parent_fraction: f64,
    pub mutation_rate: f64,
    pub crossover_points: usize,
    pub reuse_parent_fitness: bool,
    pub validation_fraction: f64,
    pub aggregation: AggregationPolicy,
    pub record_timings: bool,

    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub optimizer: OptimizerKind,

    pub backend: BackendKind,
    pub shots: u32,
    pub noise_p: f64,

    pub top_k: usize,
    pub seed: u64,
    /// Not part of the run's identity, so never written to the manifest.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ga = GaConfig::default();
        let train = TrainConfig::default();
        RunConfig {
            n_qubits: 4,
            classes: vec![0, 1, 2, 3],
            train_per_class: 6000,
            test_per_class: 1000,
            data_dir: None,
            synthetic: false,
            synthetic_spread: 0.3,
            population_size: ga.population_size,
            generations: ga.generations,
            parent_fraction: ga.parent_fraction,
            mutation_rate: ga.mutation_rate,
            crossover_points: ga.crossover_points,
            reuse_parent_fitness: ga.reuse_parent_fitness,
            validation_fraction: ga.validation_fraction,
            aggregation: ga.aggregation,
            record_timings: ga.record_timings,
            epochs: train.epochs,
            learning_rate: train.learning_rate,
            batch_size: train.batch_size,
            optimizer: OptimizerKind::Adam,
            backend: BackendKind::Exact,
            shots: DEFAULT_SHOTS,
            noise_p: DEFAULT_NOISE_P,
            top_k: 3,
            seed: 0,
            out: PathBuf::from("runs/latest"),
            threads: None,
        }
    }
}

/// Command-line values that take precedence over the document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub set: Vec<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub backend: Option<BackendKind>,
    pub shots: Option<u32>,
    pub noise_p: Option<f64>,
    pub threads: Option<usize>,
    pub synthetic: bool,
    pub top_k: Option<usize>,
}

fn parse_set(entry: &str) -> anyhow::Result<(String, toml::Value)> {
    let (key, raw) = entry
        .split_once('=')
        .with_context(|| format!("--set expects key=value, got {entry:?}"))?;
    let key = key.trim().to_string();
    let raw = raw.trim();
    // bare words such as `exact` are taken as strings
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((key, value))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<RunConfig> {
        Ok(toml::from_str(text)?)
    }

    /// Defaults, then the optional document, then overrides. Validates the
    /// result.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> anyhow::Result<RunConfig> {
        let config = Self::resolve(path, overrides)?;
        config.validate()?;
        Ok(config)
    }

    /// As [`RunConfig::load`], without validation.
    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> anyhow::Result<RunConfig> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str::<toml::Table>(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for entry in &overrides.set {
            let (key, value) = parse_set(entry)?;
            table.insert(key, value);
        }
        let mut config: RunConfig = toml::Value::Table(table).try_into().context("invalid configuration")?;
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(out) = &overrides.out {
            config.out.clone_from(out);
        }
        if let Some(b) = overrides.backend {
            config.backend = b;
        }
        if let Some(s) = overrides.shots {
            config.shots = s;
        }
        if let Some(p) = overrides.noise_p {
            config.noise_p = p;
        }
        if overrides.threads.is_some() {
            config.threads = overrides.threads;
        }
        if overrides.synthetic {
            config.synthetic = true;
        }
        if let Some(k) = overrides.top_k {
            config.top_k = k;
        }
        Ok(config)
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn feature_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn bounds(&self) -> anyhow::Result<GeneBounds> {
        Ok(GeneBounds::for_qubits(self.n_qubits)?)
    }

    pub fn ga(&self) -> GaConfig {
        GaConfig {
            population_size: self.population_size,
            generations: self.generations,
            parent_fraction: self.parent_fraction,
            mutation_rate: self.mutation_rate,
            crossover_points: self.crossover_points,
            seed: self.seed,
            reuse_parent_fitness: self.reuse_parent_fitness,
            validation_fraction: self.validation_fraction,
            aggregation: self.aggregation,
            record_timings: self.record_timings,
        }
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            optimizer: match self.optimizer {
                OptimizerKind::Sgd => Optimizer::Sgd,
                OptimizerKind::Adam => Optimizer::adam(),
            },
            seed: self.seed,
        }
    }

    pub fn backend_for(&self, kind: BackendKind) -> BackendConfig {
        match kind {
            BackendKind::Exact => BackendConfig::Exact,
            BackendKind::Shots => BackendConfig::shots(self.shots, derive_seed(self.seed, &[tag::SHOTS])),
            BackendKind::Noisy => BackendConfig::noisy(self.noise_p),
        }
    }

    pub fn backend(&self) -> BackendConfig {
        self.backend_for(self.backend)
    }

    /// Cross-field checks, run before any computation.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.validate_model()?;
        self.validate_data()
    }

    fn validate_data(&self) -> anyhow::Result<()> {
        if self.synthetic {
            if let Some(&c) = self.classes.iter().find(|&&c| c as usize >= self.feature_dim()) {
                bail!(
                    "synthetic class {c} has no basis vector among {} features",
                    self.feature_dim()
                );
            }
            if !(self.synthetic_spread >= 0.0 && self.synthetic_spread.is_finite()) {
                bail!("synthetic_spread must be finite and >= 0");
            }
        } else {
            if let Some(&c) = self.classes.iter().find(|&&c| c > 9) {
                bail!("MNIST has no class {c}");
            }
            match &self.data_dir {
                None => bail!("no data_dir given; set one or pass --synthetic"),
                Some(dir) if !dir.is_dir() => bail!("data_dir {} does not exist", dir.display()),
                Some(_) => {}
            }
        }
        if self.train_per_class == 0 || self.test_per_class == 0 {
            bail!("train_per_class and test_per_class must be >= 1");
        }
        Ok(())
    }

    /// Everything except the data source.
    pub fn validate_model(&self) -> anyhow::Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.n_qubits) {
            bail!("n_qubits {} is outside 2..={MAX_QUBITS}", self.n_qubits);
        }
        if self.classes.len() < 2 {
            bail!("at least two classes are needed, got {:?}", self.classes);
        }
        let mut sorted = self.classes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.classes.len() {
            bail!("classes {:?} contain duplicates", self.classes);
        }
        if self.classes.len() > self.feature_dim() {
            bail!(
                "{} classes exceed the 2^{} = {} amplitude-encoded features",
                self.classes.len(),
                self.n_qubits,
                self.feature_dim()
            );
        }
        if self.threads == Some(0) {
            bail!("--threads must be >= 1");
        }
        self.bounds()?;
        self.ga().validate()?;
        self.train().validate()?;
        for kind in BackendKind::ALL {
            self.backend_for(kind).validate()?;
        }
        Ok(())
    }
}
