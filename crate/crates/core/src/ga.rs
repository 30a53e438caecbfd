//! Genetic search over chromosomes.
//!
//! The training stage scores each chromosome by training its microCircuit
//! from the current pool snapshot and folds the trained parameters back at
//! the end of every generation. The inference stage scores chromosomes
//! against a frozen pool and never writes it.
//!
//! Evaluations inside a generation run on the rayon pool. Each task draws
//! from its own stream `derive_seed(master, [stage, generation, index])`,
//! so results do not depend on the thread count or scheduling.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chromosome::{crossover, mutate, random_chromosome, Chromosome, GeneBounds, MAX_LAYERS};
use crate::circuit::{resource_count, ResourceCount};
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::model::TrainConfig;
use crate::pool::{AggregationPolicy, ParameterPool, TrainedResult};
use crate::rng::{self, derive_seed, tag};
use crate::sim::BackendConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub parent_fraction: f64,
    /// Probability that an offspring receives one gene mutation.
    pub mutation_rate: f64,
    pub crossover_points: usize,
    pub seed: u64,
    /// Carried-over parents keep their previous fitness and trained
    /// parameters instead of being retrained.
    pub reuse_parent_fitness: bool,
    /// When positive, this tail fraction of the training data is held out
    /// and used for training-stage fitness instead of the test split.
    pub validation_fraction: f64,
    pub aggregation: AggregationPolicy,
    pub record_timings: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 10,
            generations: 5,
            parent_fraction: 0.4,
            mutation_rate: 0.6,
            crossover_points: 3,
            seed: 0,
            reuse_parent_fitness: false,
            validation_fraction: 0.0,
            aggregation: AggregationPolicy::BestPerSlot,
            record_timings: false,
        }
    }
}

impl GaConfig {
    pub fn parent_count(&self) -> usize {
        parent_count(self.population_size, self.parent_fraction)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGaConfig(msg));
        if !(self.parent_fraction > 0.0 && self.parent_fraction <= 1.0) {
            return bad(format!("parent_fraction {} is outside (0, 1]", self.parent_fraction));
        }
        if self.parent_count() < 2 {
            return bad(format!(
                "population {} with parent_fraction {} yields fewer than 2 parents",
                self.population_size, self.parent_fraction
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad(format!("mutation_rate {} is outside [0, 1]", self.mutation_rate));
        }
        if self.crossover_points >= crate::chromosome::CHROMOSOME_LEN {
            return bad(format!(
                "{} crossover points do not fit a chromosome",
                self.crossover_points
            ));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad(format!(
                "validation_fraction {} is outside [0, 1)",
                self.validation_fraction
            ));
        }
        Ok(())
    }
}

fn parent_count(population: usize, fraction: f64) -> usize {
    // the epsilon keeps 10 * 0.3 from flooring to 2
    (population as f64 * fraction + 1e-9).floor() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Train,
    Inference,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Train => "train",
            Stage::Inference => "inference",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub stage: Stage,
    /// 1-based; 0 marks a seed population scored outside any generation.
    pub generation: usize,
    /// Position in the generation's population.
    pub index: usize,
    pub chromosome: Chromosome,
    pub fitness: f64,
    pub resources: ResourceCount,
    /// Wall time of the evaluation, present only when timings are recorded.
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub records: Vec<FitnessRecord>,
    pub pool_revision: u64,
}

/// The top `floor(len * fraction)` chromosomes, best first; ties keep
/// population order.
pub fn select_parents(records: &[FitnessRecord], parent_fraction: f64) -> Result<Vec<Chromosome>> {
    if records.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut ranked: Vec<&FitnessRecord> = records.iter().collect();
    ranked.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
    Ok(ranked
        .into_iter()
        .take(parent_count(records.len(), parent_fraction))
        .map(|r| r.chromosome)
        .collect())
}

/// Parents first, unchanged, then offspring until the population is full.
///
/// Each offspring crosses a uniformly drawn ordered pair of distinct
/// parents and is mutated with probability `mutation_rate`.
pub fn next_generation<R: Rng + ?Sized>(
    parents: &[Chromosome],
    config: &GaConfig,
    bounds: &GeneBounds,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    if parents.len() < 2 {
        return Err(Error::TooFewParents(parents.len()));
    }
    let mut population: Vec<Chromosome> = parents.iter().take(config.population_size).copied().collect();
    while population.len() < config.population_size {
        let pair = index::sample(rng, parents.len(), 2);
        let mut child = crossover(
            &parents[pair.index(0)],
            &parents[pair.index(1)],
            config.crossover_points,
            rng,
        )?;
        if rng.random_bool(config.mutation_rate) {
            child = mutate(&child, bounds, rng);
        }
        population.push(child);
    }
    Ok(population)
}

/// Trains the chromosome's microCircuit from the pool and scores it on
/// `fitness_data`. The pool is only read.
///
/// `train_config.seed` roots both the training streams and the scoring
/// stream.
pub fn evaluate_fitness_train(
    ch: &Chromosome,
    pool: &ParameterPool,
    train: &EncodedDataset,
    fitness_data: &EncodedDataset,
    backend: &BackendConfig,
    train_config: &TrainConfig,
) -> Result<TrainedResult> {
    let model = pool.extract(ch)?;
    let (trained, _) = model.train(train, train_config, backend)?;
    let mut score_rng = rng::stream(train_config.seed, &[tag::TRAIN_EVAL, backend.seed()]);
    let fitness = trained.evaluate(fitness_data, backend, &mut score_rng)?;
    Ok(TrainedResult::from_model(*ch, fitness, &trained))
}

/// Accuracy of the chromosome's microCircuit with frozen pool parameters.
pub fn evaluate_fitness_infer<R: Rng + ?Sized>(
    ch: &Chromosome,
    pool: &ParameterPool,
    test: &EncodedDataset,
    backend: &BackendConfig,
    rng: &mut R,
) -> Result<f64> {
    pool.extract(ch)?.evaluate(test, backend, rng)
}

fn timed<T>(enabled: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = enabled.then(Instant::now);
    let value = f()?;
    Ok((value, start.map(|s| s.elapsed().as_secs_f64())))
}

fn record(
    stage: Stage,
    generation: usize,
    index: usize,
    ch: Chromosome,
    fitness: f64,
    seconds: Option<f64>,
) -> FitnessRecord {
    FitnessRecord {
        stage,
        generation,
        index,
        chromosome: ch,
        fitness,
        resources: resource_count(&ch),
        seconds,
    }
}

fn check_population(config: &GaConfig, bounds: &GeneBounds, population: &[Chromosome]) -> Result<()> {
    if population.len() != config.population_size {
        return Err(Error::InvalidGaConfig(format!(
            "population has {} chromosomes, expected {}",
            population.len(),
            config.population_size
        )));
    }
    population.iter().try_for_each(|ch| bounds.check(ch))
}

#[derive(Clone, Debug)]
pub struct TrainingOutcome {
    pub pool: ParameterPool,
    /// Records of the last evaluated generation, in population order.
    pub final_population: Vec<FitnessRecord>,
    pub logs: Vec<GenerationLog>,
}

/// Evolves and trains from a fresh random population and pool.
pub fn run_training_stage(
    config: &GaConfig,
    bounds: &GeneBounds,
    classes: usize,
    train: &EncodedDataset,
    test: &EncodedDataset,
    backend: &BackendConfig,
    train_config: &TrainConfig,
) -> Result<TrainingOutcome> {
    config.validate()?;
    bounds.validate()?;
    backend.validate()?;
    train_config.validate()?;
    if config.generations == 0 {
        return Err(Error::InvalidGaConfig(
            "the training stage needs at least one generation".into(),
        ));
    }
    let split;
    let (train, fitness_data) = if config.validation_fraction > 0.0 {
        split = data_split(train, config.validation_fraction)?;
        (&split.0, &split.1)
    } else {
        (train, test)
    };

    let mut pool_rng = rng::stream(config.seed, &[tag::POOL_INIT]);
    let mut pool = ParameterPool::init(bounds.n_qubits, *bounds.depth.end() as usize, classes, &mut pool_rng)?;
    let mut pop_rng = rng::stream(config.seed, &[tag::POPULATION]);
    let mut population: Vec<Chromosome> = (0..config.population_size)
        .map(|_| random_chromosome(bounds, &mut pop_rng))
        .collect();

    let mut logs: Vec<GenerationLog> = Vec::with_capacity(config.generations);
    let mut carried: Vec<TrainedResult> = Vec::new();
    for generation in 1..=config.generations {
        let snapshot = &pool;
        let evaluated: Vec<(TrainedResult, Option<f64>)> = population
            .par_iter()
            .enumerate()
            .map(|(index, ch)| {
                if config.reuse_parent_fitness && index < carried.len() {
                    return Ok((carried[index].clone(), None));
                }
                let task_config = TrainConfig {
                    seed: derive_seed(config.seed, &[tag::TRAIN_EVAL, generation as u64, index as u64]),
                    ..train_config.clone()
                };
                timed(config.record_timings, || {
                    evaluate_fitness_train(ch, snapshot, train, fitness_data, backend, &task_config)
                })
            })
            .collect::<Result<_>>()?;

        let results: Vec<TrainedResult> = evaluated.iter().map(|(r, _)| r.clone()).collect();
        pool = pool.reintegrate(&results, config.aggregation)?;
        let records: Vec<FitnessRecord> = evaluated
            .iter()
            .enumerate()
            .map(|(i, (r, secs))| record(Stage::Train, generation, i, r.chromosome, r.fitness, *secs))
            .collect();
        let best = records.iter().map(|r| r.fitness).fold(f64::NEG_INFINITY, f64::max);
        log::info!(
            "train generation {generation}: best fitness {best:.4}, pool revision {}",
            pool.revision()
        );

        if generation < config.generations {
            let parents = select_parents(&records, config.parent_fraction)?;
            carried = rank_results(&records, &results, parents.len());
            let mut breed_rng = rng::stream(config.seed, &[tag::BREED_TRAIN, generation as u64]);
            population = next_generation(&parents, config, bounds, &mut breed_rng)?;
        }
        logs.push(GenerationLog {
            generation,
            records,
            pool_revision: pool.revision(),
        });
    }

    let final_population = logs.last().map(|l| l.records.clone()).unwrap_or_default();
    Ok(TrainingOutcome {
        pool,
        final_population,
        logs,
    })
}

/// The results of the `count` fittest records, in the order `select_parents` returns them.
fn rank_results(records: &[FitnessRecord], results: &[TrainedResult], count: usize) -> Vec<TrainedResult> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[b].fitness.total_cmp(&records[a].fitness));
    order.into_iter().take(count).map(|i| results[i].clone()).collect()
}

fn data_split(train: &EncodedDataset, fraction: f64) -> Result<(EncodedDataset, EncodedDataset)> {
    let (fit, held_out) = train.split_tail(fraction);
    if fit.is_empty() || held_out.is_empty() {
        return Err(Error::InvalidGaConfig(format!(
            "validation_fraction {fraction} leaves an empty split of {} samples",
            train.len()
        )));
    }
    Ok((fit, held_out))
}

/// Sorts by fitness, best first; ties keep input order.
pub fn rank_records(records: &[FitnessRecord]) -> Vec<FitnessRecord> {
    let mut ranked = records.to_vec();
    ranked.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
    ranked
}

/// Evolves `seed_population` against a frozen pool.
///
/// Returns the last generation ranked by fitness and one log per
/// generation. With zero generations the seed population is scored
/// (generation 0), ranked and returned without logs.
pub fn run_inference_stage(
    pool: &ParameterPool,
    seed_population: &[Chromosome],
    config: &GaConfig,
    bounds: &GeneBounds,
    test: &EncodedDataset,
    backend: &BackendConfig,
) -> Result<(Vec<FitnessRecord>, Vec<GenerationLog>)> {
    config.validate()?;
    bounds.validate()?;
    backend.validate()?;
    check_population(config, bounds, seed_population)?;
    let before = pool.digest();

    let score = |generation: usize, population: &[Chromosome]| -> Result<Vec<FitnessRecord>> {
        population
            .par_iter()
            .enumerate()
            .map(|(index, ch)| {
                let mut task_rng = rng::stream(
                    config.seed,
                    &[tag::INFER_EVAL, generation as u64, index as u64, backend.seed()],
                );
                let (fitness, secs) = timed(config.record_timings, || {
                    evaluate_fitness_infer(ch, pool, test, backend, &mut task_rng)
                })?;
                Ok(record(Stage::Inference, generation, index, *ch, fitness, secs))
            })
            .collect()
    };

    let mut logs = Vec::with_capacity(config.generations);
    let mut population = seed_population.to_vec();
    let mut last = if config.generations == 0 {
        score(0, &population)?
    } else {
        Vec::new()
    };
    for generation in 1..=config.generations {
        let records = score(generation, &population)?;
        let best = records.iter().map(|r| r.fitness).fold(f64::NEG_INFINITY, f64::max);
        log::info!("inference generation {generation}: best fitness {best:.4}");
        if generation < config.generations {
            let parents = select_parents(&records, config.parent_fraction)?;
            let mut breed_rng = rng::stream(config.seed, &[tag::BREED_INFER, generation as u64]);
            population = next_generation(&parents, config, bounds, &mut breed_rng)?;
        }
        logs.push(GenerationLog {
            generation,
            records: records.clone(),
            pool_revision: pool.revision(),
        });
        last = records;
    }

    let after = pool.digest();
    if before != after {
        return Err(Error::PoolMutationDetected { before, after });
    }
    Ok((rank_records(&last), logs))
}

/// The `k` fittest distinct chromosomes, best first.
///
/// Repeated chromosomes keep their first occurrence; ties keep input order.
pub fn select_top_k(records: &[FitnessRecord], k: usize) -> Result<Vec<FitnessRecord>> {
    let mut seen = std::collections::HashSet::new();
    let unique: Vec<FitnessRecord> = records.iter().filter(|r| seen.insert(r.chromosome)).cloned().collect();
    if k > unique.len() {
        return Err(Error::KTooLarge {
            k,
            available: unique.len(),
        });
    }
    let mut ranked = rank_records(&unique);
    ranked.truncate(k);
    Ok(ranked)
}

/// Conventional baseline: trains the full macroCircuit and writes every
/// parameter into the pool. Also returns the trained model's accuracy on
/// `test`.
pub fn train_full_macro(
    pool: &ParameterPool,
    train: &EncodedDataset,
    test: &EncodedDataset,
    train_config: &TrainConfig,
    backend: &BackendConfig,
) -> Result<(ParameterPool, f64)> {
    if pool.layers() > MAX_LAYERS {
        return Err(Error::ShapeMismatch(format!("pool has {} layers", pool.layers())));
    }
    let n = pool.n_qubits() as u32;
    let bounds = GeneBounds::new(1..=n, 1..=pool.layers() as u32, pool.n_qubits())?;
    let full = Chromosome::full(&bounds);
    let model = pool.extract(&full)?;
    let (trained, _) = model.train(train, train_config, backend)?;
    let mut score_rng = rng::stream(train_config.seed, &[tag::BASELINE, backend.seed()]);
    let accuracy = trained.evaluate(test, backend, &mut score_rng)?;
    Ok((pool.overwrite_from(&trained)?, accuracy))
}
