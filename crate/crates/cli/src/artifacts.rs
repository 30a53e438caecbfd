//! On-disk artifacts of a run directory and the manifest that lists them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use evoqnn_core::ga::{FitnessRecord, GenerationLog};
use evoqnn_core::Chromosome;

use crate::config::RunConfig;

pub const MANIFEST: &str = "manifest.json";
pub const POOL: &str = "pool.json";
pub const POOL_REGULAR: &str = "pool_regular.json";
pub const PCA: &str = "pca.json";
pub const TRAIN_CSV: &str = "train_generations.csv";
pub const FINAL_POPULATION: &str = "final_population.json";
pub const INFER_CSV: &str = "infer_generations.csv";
pub const RANKED: &str = "ranked_population.json";
pub const SELECTION: &str = "selection.json";
pub const COMPARE_CSV: &str = "compare_backends.csv";
pub const REPORT: &str = "report.md";

pub const CSV_HEADER: [&str; 8] = [
    "stage",
    "generation",
    "index",
    "chromosome",
    "fitness",
    "rx",
    "cnot",
    "seconds",
];

/// A file the manifest names but the run directory lacks.
#[derive(Debug)]
pub struct MissingArtifact {
    pub path: PathBuf,
}

impl fmt::Display for MissingArtifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "missing artifact {}", self.path.display())
    }
}

impl std::error::Error for MissingArtifact {}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Snapshot of the configuration of the latest subcommand.
    pub config: Option<RunConfig>,
    /// File name to the subcommand that wrote it.
    pub artifacts: BTreeMap<String, String>,
    /// Scalar results such as the baseline's test accuracy.
    pub metrics: BTreeMap<String, f64>,
    /// Per-subcommand wall time; filled only when timings are recorded.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> anyhow::Result<RunManifest> {
        let path = dir.join(MANIFEST);
        if !path.is_file() {
            return Err(MissingArtifact { path }.into());
        }
        read_json(&path)
    }

    fn load_or_default(dir: &Path) -> anyhow::Result<RunManifest> {
        if dir.join(MANIFEST).is_file() {
            Self::load(dir)
        } else {
            Ok(RunManifest::default())
        }
    }

    pub fn lists(&self, name: &str) -> bool {
        self.artifacts.contains_key(name)
    }

    /// Path of a listed artifact, checking that it exists.
    pub fn require(&self, dir: &Path, name: &str) -> anyhow::Result<PathBuf> {
        let path = dir.join(name);
        if !self.lists(name) || !path.is_file() {
            return Err(MissingArtifact { path }.into());
        }
        Ok(path)
    }
}

/// Collects what one subcommand writes and merges it into the manifest.
pub struct Recorder {
    dir: PathBuf,
    command: &'static str,
    written: Vec<String>,
    metrics: BTreeMap<String, f64>,
}

impl Recorder {
    pub fn new(dir: &Path, command: &'static str) -> anyhow::Result<Recorder> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Recorder {
            dir: dir.to_path_buf(),
            command,
            written: Vec::new(),
            metrics: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> anyhow::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }

    pub fn text(&mut self, name: &str, text: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn csv_records(&mut self, name: &str, records: &[FitnessRecord]) -> anyhow::Result<PathBuf> {
        let text = records_csv(records)?;
        self.text(name, &text)
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// Merges into the manifest. `config` replaces the snapshot; `None`
    /// keeps the existing one.
    pub fn finish(self, config: Option<&RunConfig>, seconds: f64) -> anyhow::Result<RunManifest> {
        let mut manifest = RunManifest::load_or_default(&self.dir)?;
        manifest.tool_version = env!("CARGO_PKG_VERSION").to_string();
        if let Some(config) = config {
            manifest.config = Some(config.clone());
        }
        for name in self.written {
            manifest.artifacts.insert(name, self.command.to_string());
        }
        manifest.metrics.extend(self.metrics);
        if manifest.config.as_ref().is_some_and(|c| c.record_timings) {
            manifest.timings.insert(self.command.to_string(), seconds);
        }
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(manifest)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    if !path.is_file() {
        return Err(MissingArtifact {
            path: path.to_path_buf(),
        }
        .into());
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn flatten(logs: &[GenerationLog]) -> Vec<FitnessRecord> {
    logs.iter().flat_map(|l| l.records.iter().cloned()).collect()
}

pub fn records_csv(records: &[FitnessRecord]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.stage.as_str().to_string(),
            r.generation.to_string(),
            r.index.to_string(),
            r.chromosome.to_string(),
            r.fitness.to_string(),
            r.resources.rx.to_string(),
            r.resources.cnot.to_string(),
            r.seconds.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// One parsed row of a generation CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub stage: String,
    pub generation: usize,
    pub index: usize,
    pub chromosome: Chromosome,
    pub fitness: f64,
    pub rx: usize,
    pub cnot: usize,
}

fn parse_chromosome(text: &str) -> anyhow::Result<Chromosome> {
    let genes: Vec<u32> = serde_json::from_str(text).with_context(|| format!("bad chromosome {text:?}"))?;
    let genes: [u32; 5] = genes
        .try_into()
        .map_err(|g: Vec<u32>| anyhow::anyhow!("chromosome has {} genes", g.len()))?;
    Ok(Chromosome::new(genes))
}

pub fn read_records_csv(path: &Path) -> anyhow::Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        anyhow::bail!("{} has header {header:?}", path.display());
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(CsvRow {
            stage: rec[0].to_string(),
            generation: rec[1].parse()?,
            index: rec[2].parse()?,
            chromosome: parse_chromosome(&rec[3])?,
            fitness: rec[4].parse()?,
            rx: rec[5].parse()?,
            cnot: rec[6].parse()?,
        });
    }
    Ok(rows)
}
