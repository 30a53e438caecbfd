//! The six subcommands. Each one reads a validated [`RunConfig`], writes its
//! artifacts into `config.out` and merges them into the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};

use evoqnn_core::chromosome::random_chromosome;
use evoqnn_core::data::{self, load_idx, EncodedDataset, PcaModel};
use evoqnn_core::ga::{
    run_inference_stage, run_training_stage, select_top_k, train_full_macro, FitnessRecord, GenerationLog,
    TrainingOutcome,
};
use evoqnn_core::rng::{self, tag};
use evoqnn_core::{Chromosome, ParameterPool};

use crate::artifacts::{self as art, read_json, Recorder};
use crate::config::{BackendKind, RunConfig};

const TRAIN_SPLIT: u64 = 0;
const TEST_SPLIT: u64 = 1;

/// Encoded train/test data plus the projection used to produce it.
pub struct Datasets {
    pub train: EncodedDataset,
    pub test: EncodedDataset,
    pub pca: Option<PcaModel>,
}

fn idx_pair(dir: &Path, prefix: &str, kind: &str) -> anyhow::Result<(PathBuf, PathBuf)> {
    let find = |stem: String| -> anyhow::Result<PathBuf> {
        [dir.join(&stem), dir.join(format!("{stem}.gz"))]
            .into_iter()
            .find(|p| p.is_file())
            .with_context(|| format!("no {stem}[.gz] in {}", dir.display()))
    };
    Ok((
        find(format!("{prefix}-images-{kind}3-ubyte"))?,
        find(format!("{prefix}-labels-{kind}1-ubyte"))?,
    ))
}

fn mnist_split(config: &RunConfig, split: u64) -> anyhow::Result<data::RawDataset> {
    let dir = config.data_dir.as_deref().context("no data_dir configured")?;
    let (prefix, per_class) = match split {
        TRAIN_SPLIT => ("train", config.train_per_class),
        _ => ("t10k", config.test_per_class),
    };
    let (images, labels) = idx_pair(dir, prefix, "idx")?;
    let raw = load_idx(images, labels)?;
    let mut rng = rng::stream(config.seed, &[tag::DATA, split]);
    Ok(data::subset_classes(&raw, &config.classes, per_class, &mut rng)?)
}

fn synthetic_split(config: &RunConfig, split: u64) -> anyhow::Result<EncodedDataset> {
    let per_class = match split {
        TRAIN_SPLIT => config.train_per_class,
        _ => config.test_per_class,
    };
    let mut rng = rng::stream(config.seed, &[tag::DATA, split]);
    let mut set = data::synthetic_blobs(
        *config.classes.iter().max().unwrap() as usize + 1,
        config.feature_dim(),
        per_class,
        config.synthetic_spread,
        &mut rng,
    )?;
    // keep only the configured blobs, relabelled by ascending id
    let map = data::class_map(&config.classes);
    let keep: Vec<usize> = (0..set.len())
        .filter(|&i| map.contains_key(&(set.labels[i] as u8)))
        .collect();
    set.features = keep.iter().map(|&i| set.features[i].clone()).collect();
    set.labels = keep.iter().map(|&i| map[&(set.labels[i] as u8)]).collect();
    set.class_map = map;
    Ok(set)
}

/// Builds both splits, fitting PCA on the training images for MNIST.
pub fn load_datasets(config: &RunConfig) -> anyhow::Result<Datasets> {
    if config.synthetic {
        return Ok(Datasets {
            train: synthetic_split(config, TRAIN_SPLIT)?,
            test: synthetic_split(config, TEST_SPLIT)?,
            pca: None,
        });
    }
    let train_raw = mnist_split(config, TRAIN_SPLIT)?;
    let test_raw = mnist_split(config, TEST_SPLIT)?;
    let pca = data::fit_pca(&train_raw.scaled(), config.feature_dim())?;
    Ok(Datasets {
        train: data::project_and_normalize(&pca, &train_raw, &config.classes)?,
        test: data::project_and_normalize(&pca, &test_raw, &config.classes)?,
        pca: Some(pca),
    })
}

/// The test split alone, projected through a previously fitted PCA.
pub fn load_test_set(config: &RunConfig, pca_path: &Path) -> anyhow::Result<EncodedDataset> {
    if config.synthetic {
        return synthetic_split(config, TEST_SPLIT);
    }
    let pca: PcaModel = read_json(pca_path)?;
    ensure!(
        pca.output_dim() == config.feature_dim(),
        "{} projects to {} features but {} qubits need {}",
        pca_path.display(),
        pca.output_dim(),
        config.n_qubits,
        config.feature_dim()
    );
    let raw = mnist_split(config, TEST_SPLIT)?;
    Ok(data::project_and_normalize(&pca, &raw, &config.classes)?)
}

fn check_pool(pool: &ParameterPool, config: &RunConfig, path: &Path) -> anyhow::Result<()> {
    ensure!(
        pool.n_qubits() == config.n_qubits && pool.classes() == config.n_classes(),
        "{} holds a {}-qubit, {}-class pool but the run is configured for {} qubits and {} classes",
        path.display(),
        pool.n_qubits(),
        pool.classes(),
        config.n_qubits,
        config.n_classes()
    );
    Ok(())
}

fn write_pca(rec: &mut Recorder, pca: &Option<PcaModel>) -> anyhow::Result<()> {
    if let Some(pca) = pca {
        rec.json(art::PCA, pca)?;
    }
    Ok(())
}

pub fn cmd_train(config: &RunConfig) -> anyhow::Result<TrainingOutcome> {
    let start = Instant::now();
    let data = load_datasets(config)?;
    let outcome = run_training_stage(
        &config.ga(),
        &config.bounds()?,
        config.n_classes(),
        &data.train,
        &data.test,
        &config.backend(),
        &config.train(),
    )?;
    let mut rec = Recorder::new(&config.out, "train")?;
    rec.json(art::POOL, &outcome.pool)?;
    write_pca(&mut rec, &data.pca)?;
    rec.csv_records(art::TRAIN_CSV, &art::flatten(&outcome.logs))?;
    rec.json(art::FINAL_POPULATION, &outcome.final_population)?;
    rec.finish(Some(config), start.elapsed().as_secs_f64())?;
    Ok(outcome)
}

pub fn cmd_baseline(config: &RunConfig) -> anyhow::Result<(ParameterPool, f64)> {
    let start = Instant::now();
    let data = load_datasets(config)?;
    let bounds = config.bounds()?;
    let mut pool_rng = rng::stream(config.seed, &[tag::POOL_INIT]);
    let init = ParameterPool::init(
        config.n_qubits,
        *bounds.depth.end() as usize,
        config.n_classes(),
        &mut pool_rng,
    )?;
    let (pool, accuracy) = train_full_macro(&init, &data.train, &data.test, &config.train(), &config.backend())?;
    let mut rec = Recorder::new(&config.out, "baseline")?;
    rec.json(art::POOL_REGULAR, &pool)?;
    write_pca(&mut rec, &data.pca)?;
    rec.metric("baseline_accuracy", accuracy);
    rec.finish(Some(config), start.elapsed().as_secs_f64())?;
    Ok((pool, accuracy))
}

/// Inputs of `infer`; `None` means the file of that name in `config.out`.
#[derive(Clone, Debug, Default)]
pub struct InferInputs {
    pub pool: Option<PathBuf>,
    pub population: Option<PathBuf>,
    pub pca: Option<PathBuf>,
}

fn or_default(path: &Option<PathBuf>, config: &RunConfig, name: &str) -> PathBuf {
    path.clone().unwrap_or_else(|| config.out.join(name))
}

pub struct InferOutcome {
    pub ranked: Vec<FitnessRecord>,
    pub logs: Vec<GenerationLog>,
    pub digest: String,
}

fn read_population(path: &Path) -> anyhow::Result<Vec<Chromosome>> {
    let records: Vec<FitnessRecord> = read_json(path)?;
    Ok(records.into_iter().map(|r| r.chromosome).collect())
}

fn infer_with(
    config: &RunConfig,
    kind: BackendKind,
    pool: &ParameterPool,
    population: &[Chromosome],
    test: &EncodedDataset,
) -> anyhow::Result<(Vec<FitnessRecord>, Vec<GenerationLog>)> {
    Ok(run_inference_stage(
        pool,
        population,
        &config.ga(),
        &config.bounds()?,
        test,
        &config.backend_for(kind),
    )?)
}

pub fn cmd_infer(config: &RunConfig, inputs: &InferInputs) -> anyhow::Result<InferOutcome> {
    let start = Instant::now();
    let pool_path = or_default(&inputs.pool, config, art::POOL);
    let pool: ParameterPool = read_json(&pool_path)?;
    check_pool(&pool, config, &pool_path)?;
    let population = read_population(&or_default(&inputs.population, config, art::FINAL_POPULATION))?;
    let test = load_test_set(config, &or_default(&inputs.pca, config, art::PCA))?;

    let digest = pool.digest();
    let (ranked, logs) = infer_with(config, config.backend, &pool, &population, &test)?;
    ensure!(pool.digest() == digest, "pool digest changed during inference");
    println!("pool digest {digest} unchanged (revision {})", pool.revision());

    let mut rec = Recorder::new(&config.out, "infer")?;
    let rows = if logs.is_empty() {
        ranked.clone()
    } else {
        art::flatten(&logs)
    };
    rec.csv_records(art::INFER_CSV, &rows)?;
    rec.json(art::RANKED, &ranked)?;
    rec.finish(Some(config), start.elapsed().as_secs_f64())?;
    Ok(InferOutcome { ranked, logs, digest })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub rank: usize,
    pub chromosome: Chromosome,
    pub fitness: f64,
    pub rx: usize,
    pub cnot: usize,
    pub resources: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub k: usize,
    pub rows: Vec<SelectionRow>,
}

fn selection_rows(records: &[FitnessRecord]) -> Vec<SelectionRow> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| SelectionRow {
            rank: i + 1,
            chromosome: r.chromosome,
            fitness: r.fitness,
            rx: r.resources.rx,
            cnot: r.resources.cnot,
            resources: r.resources.to_string(),
        })
        .collect()
}

/// Plain-text ranking with the selected rows starred.
pub fn selection_table(all: &[SelectionRow], k: usize) -> String {
    let mut out = format!(
        "{:<6} {:<13} {:>9}  {}\n",
        "rank", "chromosome", "accuracy", "resources"
    );
    for row in all {
        let mark = if row.rank <= k { "*" } else { " " };
        out.push_str(&format!(
            "{mark}{:<5} {:<13} {:>9.3}  {}\n",
            row.rank,
            row.chromosome.to_string(),
            row.fitness,
            row.resources
        ));
    }
    out
}

pub fn cmd_select(config: &RunConfig, ranked: Option<&Path>) -> anyhow::Result<Selection> {
    let start = Instant::now();
    let path = ranked.map_or_else(|| config.out.join(art::RANKED), Path::to_path_buf);
    let records: Vec<FitnessRecord> = read_json(&path)?;
    let top = select_top_k(&records, config.top_k)?;
    let distinct = records
        .iter()
        .map(|r| r.chromosome)
        .collect::<std::collections::HashSet<_>>()
        .len();
    let all = selection_rows(&select_top_k(&records, distinct)?);
    print!("{}", selection_table(&all, config.top_k));

    let selection = Selection {
        k: config.top_k,
        rows: selection_rows(&top),
    };
    let mut rec = Recorder::new(&config.out, "select")?;
    rec.json(art::SELECTION, &selection)?;
    rec.finish(None, start.elapsed().as_secs_f64())?;
    Ok(selection)
}

#[derive(Clone, Debug, Default)]
pub struct CompareInputs {
    pub ga_pool: Option<PathBuf>,
    pub regular_pool: Option<PathBuf>,
    /// Seed population shared by both pools; a seeded random one otherwise.
    pub population: Option<PathBuf>,
    pub pca: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub backend: BackendKind,
    pub ga_best: f64,
    pub regular_best: f64,
    /// GA minus regular, signed.
    pub delta: f64,
}

pub fn cmd_compare_backends(config: &RunConfig, inputs: &CompareInputs) -> anyhow::Result<Vec<ComparisonRow>> {
    let start = Instant::now();
    let load_pool = |path: PathBuf| -> anyhow::Result<ParameterPool> {
        let pool = read_json(&path)?;
        check_pool(&pool, config, &path)?;
        Ok(pool)
    };
    let ga_pool = load_pool(or_default(&inputs.ga_pool, config, art::POOL))?;
    let regular_pool = load_pool(or_default(&inputs.regular_pool, config, art::POOL_REGULAR))?;
    let population = match &inputs.population {
        Some(path) => read_population(path)?,
        None => {
            let bounds = config.bounds()?;
            let mut rng = rng::stream(config.seed, &[tag::POPULATION]);
            (0..config.population_size)
                .map(|_| random_chromosome(&bounds, &mut rng))
                .collect()
        }
    };
    let test = load_test_set(config, &or_default(&inputs.pca, config, art::PCA))?;

    let best = |kind, pool: &ParameterPool| -> anyhow::Result<f64> {
        // ranked best first, so the top row is also the best of any top-k
        let (ranked, _) = infer_with(config, kind, pool, &population, &test)?;
        Ok(ranked.first().map_or(0.0, |r| r.fitness))
    };
    let mut rows = Vec::new();
    for kind in BackendKind::ALL {
        let ga_best = best(kind, &ga_pool)?;
        let regular_best = best(kind, &regular_pool)?;
        log::info!("{}: GA {ga_best:.4} vs regular {regular_best:.4}", kind.as_str());
        rows.push(ComparisonRow {
            backend: kind,
            ga_best,
            regular_best,
            delta: ga_best - regular_best,
        });
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["backend", "ga_best", "regular_best", "delta"])?;
    for r in &rows {
        w.write_record([
            r.backend.as_str().to_string(),
            r.ga_best.to_string(),
            r.regular_best.to_string(),
            format!("{:+}", r.delta),
        ])?;
    }
    let mut rec = Recorder::new(&config.out, "compare-backends")?;
    rec.text(art::COMPARE_CSV, &String::from_utf8(w.into_inner()?)?)?;
    rec.finish(Some(config), start.elapsed().as_secs_f64())?;
    Ok(rows)
}

pub fn read_comparison(path: &Path) -> anyhow::Result<Vec<ComparisonRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let backend = match &rec[0] {
            "exact" => BackendKind::Exact,
            "shots" => BackendKind::Shots,
            "noisy" => BackendKind::Noisy,
            other => bail!("unknown backend {other:?} in {}", path.display()),
        };
        rows.push(ComparisonRow {
            backend,
            ga_best: rec[1].parse()?,
            regular_best: rec[2].parse()?,
            delta: rec[3].parse()?,
        });
    }
    Ok(rows)
}
