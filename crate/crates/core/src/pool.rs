//! Shared macroCircuit parameters.
//!
//! Every slot `(layer, wire)` of the macroCircuit owns one angle, and the
//! classical head is shared by all microCircuits. During a generation the
//! pool is only read (`&ParameterPool`, many concurrent `extract`s); the
//! single write happens in [`ParameterPool::reintegrate`], which consumes
//! the generation's results at the barrier and returns the next pool.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chromosome::Chromosome;
use crate::circuit::{build, SlotId};
use crate::error::{Error, Result};
use crate::model::{Head, HybridModel};
use crate::sim::Angles;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationPolicy {
    /// Each slot takes the angle of the fittest result that used it; the
    /// head is copied from the fittest result overall.
    #[default]
    BestPerSlot,
    /// Fitness-weighted mean over the results that used each slot (plain
    /// mean when all those fitnesses are zero); the head is the weighted
    /// mean over all results.
    FitnessWeightedMean,
}

/// A trained microCircuit, ready to be folded back into the pool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedResult {
    pub chromosome: Chromosome,
    pub fitness: f64,
    pub angles: Angles,
    pub head_weights: Vec<f64>,
    pub head_bias: Vec<f64>,
}

impl TrainedResult {
    pub fn from_model(chromosome: Chromosome, fitness: f64, model: &HybridModel) -> Self {
        TrainedResult {
            chromosome,
            fitness,
            angles: model.angles.clone(),
            head_weights: model.head.weights.clone(),
            head_bias: model.head.bias.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPool {
    n_qubits: usize,
    layers: usize,
    classes: usize,
    revision: u64,
    /// Indexed by `(layer - 1) * n_qubits + wire`.
    quantum: Vec<f64>,
    head: Head,
}

#[derive(Serialize, Deserialize)]
struct SlotEntry {
    layer: usize,
    wire: usize,
    angle: f64,
}

#[derive(Serialize, Deserialize)]
struct PoolDocument {
    n: usize,
    #[serde(rename = "L_max")]
    l_max: usize,
    #[serde(rename = "C")]
    c: usize,
    revision: u64,
    quantum: Vec<SlotEntry>,
    head_weights: Vec<f64>,
    head_bias: Vec<f64>,
}

impl Serialize for ParameterPool {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoolDocument {
            n: self.n_qubits,
            l_max: self.layers,
            c: self.classes,
            revision: self.revision,
            quantum: self
                .slot_ids()
                .map(|id| SlotEntry {
                    layer: id.layer,
                    wire: id.wire,
                    angle: self.angle(id),
                })
                .collect(),
            head_weights: self.head.weights.clone(),
            head_bias: self.head.bias.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParameterPool {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = PoolDocument::deserialize(d)?;
        let mut pool = ParameterPool {
            n_qubits: doc.n,
            layers: doc.l_max,
            classes: doc.c,
            revision: doc.revision,
            quantum: vec![f64::NAN; doc.n * doc.l_max],
            head: Head::from_parts(doc.c, doc.n, doc.head_weights, doc.head_bias).map_err(D::Error::custom)?,
        };
        for e in doc.quantum {
            if e.layer == 0 || e.layer > doc.l_max || e.wire >= doc.n {
                return Err(D::Error::custom(format!("slot ({},{}) out of range", e.layer, e.wire)));
            }
            let i = pool.index(SlotId {
                layer: e.layer,
                wire: e.wire,
            });
            pool.quantum[i] = e.angle;
        }
        if pool.quantum.iter().any(|a| a.is_nan()) {
            return Err(D::Error::custom("pool document does not cover every slot"));
        }
        Ok(pool)
    }
}

impl ParameterPool {
    /// Angles uniform in `[-π, π]`, head weights uniform in `±1/√n`, zero bias.
    pub fn init<R: Rng + ?Sized>(n_qubits: usize, layers: usize, classes: usize, rng: &mut R) -> Result<Self> {
        if n_qubits == 0 || layers == 0 || classes == 0 {
            return Err(Error::ShapeMismatch("pool dimensions must be >= 1".into()));
        }
        let quantum = (0..n_qubits * layers).map(|_| rng.random_range(-PI..=PI)).collect();
        let a = 1.0 / (n_qubits as f64).sqrt();
        let weights = (0..classes * n_qubits).map(|_| rng.random_range(-a..=a)).collect();
        Ok(ParameterPool {
            n_qubits,
            layers,
            classes,
            revision: 0,
            quantum,
            head: Head::from_parts(classes, n_qubits, weights, vec![0.0; classes])?,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn head(&self) -> &Head {
        &self.head
    }

    fn index(&self, id: SlotId) -> usize {
        (id.layer - 1) * self.n_qubits + id.wire
    }

    pub fn angle(&self, id: SlotId) -> f64 {
        self.quantum[self.index(id)]
    }

    pub fn set_angle(&mut self, id: SlotId, angle: f64) {
        let i = self.index(id);
        self.quantum[i] = angle;
    }

    /// Every slot of the macroCircuit, layer-major.
    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> + '_ {
        (1..=self.layers).flat_map(move |layer| (0..self.n_qubits).map(move |wire| SlotId { layer, wire }))
    }

    /// Copies the chromosome's active angles and the head into a model.
    pub fn extract(&self, ch: &Chromosome) -> Result<HybridModel> {
        if ch.depth() > self.layers {
            return Err(Error::InvalidChromosome {
                genes: *ch.genes(),
                reason: format!("depth exceeds the pool's {} layers", self.layers),
            });
        }
        let spec = build(ch, self.n_qubits)?;
        let angles = spec.slots().iter().map(|s| (*s, self.angle(*s))).collect();
        HybridModel::new(spec, angles, self.head.clone())
    }

    /// Folds one generation's results into a new pool (revision + 1).
    ///
    /// `results` must be in population order; that order breaks fitness ties.
    pub fn reintegrate(&self, results: &[TrainedResult], policy: AggregationPolicy) -> Result<ParameterPool> {
        if results.is_empty() {
            return Err(Error::EmptyResults);
        }
        for r in results {
            if r.head_weights.len() != self.head.weights.len() || r.head_bias.len() != self.classes {
                return Err(Error::ShapeMismatch(format!(
                    "result for {} has a mismatched head",
                    r.chromosome
                )));
            }
        }
        let mut next = self.clone();
        match policy {
            AggregationPolicy::BestPerSlot => {
                let mut ranked: Vec<&TrainedResult> = results.iter().collect();
                // stable: equal fitness keeps population order
                ranked.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
                for id in self.slot_ids() {
                    if let Some(angle) = ranked.iter().find_map(|r| r.angles.get(&id)) {
                        next.set_angle(id, *angle);
                    }
                }
                next.head.weights.clone_from(&ranked[0].head_weights);
                next.head.bias.clone_from(&ranked[0].head_bias);
            }
            AggregationPolicy::FitnessWeightedMean => {
                for id in self.slot_ids() {
                    let covering: Vec<(f64, f64)> = results
                        .iter()
                        .filter_map(|r| r.angles.get(&id).map(|a| (r.fitness, *a)))
                        .collect();
                    if let Some(mean) = weighted_mean(covering.iter().map(|&(w, v)| (w, v))) {
                        next.set_angle(id, mean);
                    }
                }
                for (i, w) in next.head.weights.iter_mut().enumerate() {
                    *w = weighted_mean(results.iter().map(|r| (r.fitness, r.head_weights[i]))).unwrap();
                }
                for (i, b) in next.head.bias.iter_mut().enumerate() {
                    *b = weighted_mean(results.iter().map(|r| (r.fitness, r.head_bias[i]))).unwrap();
                }
            }
        }
        next.revision += 1;
        Ok(next)
    }

    /// Writes every parameter of `model` into the pool and bumps the revision.
    pub fn overwrite_from(&self, model: &HybridModel) -> Result<ParameterPool> {
        if model.head.weights.len() != self.head.weights.len() || model.head.bias.len() != self.classes {
            return Err(Error::ShapeMismatch("model head does not match the pool".into()));
        }
        let mut next = self.clone();
        for (id, angle) in &model.angles {
            next.set_angle(*id, *angle);
        }
        next.head = model.head.clone();
        next.revision += 1;
        Ok(next)
    }

    /// SHA-256 over shape, angles and head; the revision is excluded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for dim in [self.n_qubits, self.layers, self.classes] {
            h.update((dim as u64).to_le_bytes());
        }
        for v in self.quantum.iter().chain(&self.head.weights).chain(&self.head.bias) {
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn weighted_mean(items: impl Iterator<Item = (f64, f64)> + Clone) -> Option<f64> {
    let (mut wsum, mut acc, mut count, mut plain) = (0.0, 0.0, 0usize, 0.0);
    for (w, v) in items {
        wsum += w;
        acc += w * v;
        plain += v;
        count += 1;
    }
    match count {
        0 => None,
        _ if wsum > 0.0 => Some(acc / wsum),
        _ => Some(plain / count as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool() -> ParameterPool {
        ParameterPool::init(4, 2, 4, &mut ChaCha8Rng::seed_from_u64(17)).unwrap()
    }

    fn result(ch: [u32; 5], fitness: f64, angle: f64, head: f64) -> TrainedResult {
        let p = pool();
        let model = p.extract(&Chromosome::new(ch)).unwrap();
        TrainedResult {
            chromosome: Chromosome::new(ch),
            fitness,
            angles: model.angles.keys().map(|k| (*k, angle)).collect(),
            head_weights: vec![head; 16],
            head_bias: vec![head; 4],
        }
    }

    const S10: SlotId = SlotId { layer: 1, wire: 0 };
    const S11: SlotId = SlotId { layer: 1, wire: 1 };

    #[test]
    fn init_shapes_and_ranges() {
        let p = pool();
        assert_eq!(p.slot_ids().count(), 8);
        assert_eq!(p.head().weights.len() + p.head().bias.len(), 20);
        assert!(p.quantum.iter().all(|a| (-PI..=PI).contains(a)));
        assert!(p.head().weights.iter().all(|w| w.abs() <= 0.5));
        assert!(p.head().bias.iter().all(|b| *b == 0.0));
        assert_eq!(p, pool());
        assert!(ParameterPool::init(4, 0, 4, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn extract_is_a_snapshot() {
        let p = pool();
        let before = p.digest();
        let full = p.extract(&Chromosome::new([4, 4, 4, 4, 2])).unwrap();
        assert_eq!(full.angles.len(), 8);
        let one = p.extract(&Chromosome::new([1, 1, 4, 1, 1])).unwrap();
        assert_eq!(one.angles.keys().copied().collect::<Vec<_>>(), vec![S10]);
        assert_eq!(one.angles[&S10], p.angle(S10));
        assert_eq!(p.extract(&Chromosome::new([1, 1, 4, 1, 1])).unwrap(), one);
        assert_eq!(p.digest(), before);
    }

    #[test]
    fn single_full_result_replaces_everything() {
        let p = pool();
        let r = result([4, 4, 4, 4, 2], 0.7, 0.123, 0.5);
        let next = p.reintegrate(&[r], AggregationPolicy::BestPerSlot).unwrap();
        assert!(next.slot_ids().all(|s| next.angle(s) == 0.123));
        assert_eq!(next.revision(), 1);
        assert_eq!(next.head().bias, vec![0.5; 4]);
    }

    #[test]
    fn disjoint_coverage_ignores_fitness_order() {
        let p = pool();
        let a = result([1, 1, 1, 1, 1], 0.1, 1.0, 0.0);
        // [2,..] covers (1,0),(1,1); use a hand-built result covering only (2,0)
        let mut b = result([1, 1, 1, 1, 2], 0.9, 2.0, 0.0);
        b.angles.remove(&S10);
        let next = p.reintegrate(&[a, b], AggregationPolicy::BestPerSlot).unwrap();
        assert_eq!(next.angle(S10), 1.0);
        assert_eq!(next.angle(SlotId { layer: 2, wire: 0 }), 2.0);
    }

    #[test]
    fn best_fitness_wins_shared_slots() {
        let p = pool();
        let a = result([1, 1, 1, 1, 1], 0.9, 1.0, 0.9);
        let b = result([2, 1, 1, 1, 1], 0.5, 2.0, 0.5);
        let next = p.reintegrate(&[a, b], AggregationPolicy::BestPerSlot).unwrap();
        assert_eq!(next.angle(S10), 1.0);
        assert_eq!(next.angle(S11), 2.0);
        assert_eq!(next.head().bias, vec![0.9; 4]);
        // uncovered slots are untouched, bit for bit
        let s = SlotId { layer: 2, wire: 3 };
        assert_eq!(next.angle(s).to_bits(), p.angle(s).to_bits());
    }

    #[test]
    fn ties_prefer_lower_population_index() {
        let p = pool();
        let a = result([1, 1, 1, 1, 1], 0.5, 1.0, 0.1);
        let b = result([1, 1, 1, 1, 1], 0.5, 2.0, 0.2);
        let next = p.reintegrate(&[a, b], AggregationPolicy::BestPerSlot).unwrap();
        assert_eq!(next.angle(S10), 1.0);
        assert_eq!(next.head().bias, vec![0.1; 4]);
    }

    #[test]
    fn weighted_mean_policy() {
        let p = pool();
        let a = result([1, 1, 1, 1, 1], 0.75, 1.0, 1.0);
        let b = result([2, 1, 1, 1, 1], 0.25, 2.0, 3.0);
        let next = p.reintegrate(&[a, b], AggregationPolicy::FitnessWeightedMean).unwrap();
        assert!((next.angle(S10) - 1.25).abs() < 1e-15);
        assert_eq!(next.angle(S11), 2.0);
        assert!((next.head().bias[0] - 1.5).abs() < 1e-15);
        let z = result([1, 1, 1, 1, 1], 0.0, 4.0, 0.0);
        let z2 = result([1, 1, 1, 1, 1], 0.0, 2.0, 0.0);
        let next = p.reintegrate(&[z, z2], AggregationPolicy::FitnessWeightedMean).unwrap();
        assert_eq!(next.angle(S10), 3.0);
    }

    #[test]
    fn empty_results() {
        assert!(matches!(
            pool().reintegrate(&[], AggregationPolicy::BestPerSlot),
            Err(Error::EmptyResults)
        ));
    }

    #[test]
    fn digest_tracks_content_not_revision() {
        let p = pool();
        assert_eq!(p.digest(), p.clone().digest());
        let mut q = p.clone();
        q.set_angle(S11, p.angle(S11) + 1e-3);
        assert_ne!(p.digest(), q.digest());
        let mut r = p.clone();
        r.revision = 9;
        assert_eq!(p.digest(), r.digest());
    }

    #[test]
    fn json_document_round_trip() {
        let p = pool();
        let text = serde_json::to_string(&p).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["n", "L_max", "C", "revision", "quantum", "head_weights", "head_bias"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["quantum"][5]["layer"], 2);
        assert_eq!(v["quantum"][5]["wire"], 1);
        let back: ParameterPool = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let mut v2 = v.clone();
        v2["quantum"].as_array_mut().unwrap().pop();
        assert!(serde_json::from_value::<ParameterPool>(v2).is_err());
    }
}
