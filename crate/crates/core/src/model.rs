//! Hybrid classifier: circuit expectations feed a linear softmax head.
//!
//! `p = softmax(W z + b)` with `z = <Z_i>` of the microCircuit applied to
//! the amplitude-encoded input. Quantum gradients use the parameter-shift
//! rule at the expectation level, `dz/dθ = (z(θ + π/2) - z(θ - π/2)) / 2`,
//! chained through the analytic softmax/cross-entropy/linear Jacobian.

use std::f64::consts::FRAC_PI_2;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::MicroCircuitSpec;
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::rng;
use crate::sim::{execute, Angles, BackendConfig};

pub const PROB_FLOOR: f64 = 1e-12;

/// Linear read-out: `classes x n_qubits` row-major weights plus bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Head {
    pub classes: usize,
    pub inputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Head {
    pub fn zeros(classes: usize, inputs: usize) -> Self {
        Head {
            classes,
            inputs,
            weights: vec![0.0; classes * inputs],
            bias: vec![0.0; classes],
        }
    }

    pub fn from_parts(classes: usize, inputs: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != classes * inputs || bias.len() != classes {
            return Err(Error::ShapeMismatch(format!(
                "head expects {classes}x{inputs} weights and {classes} biases, got {} and {}",
                weights.len(),
                bias.len()
            )));
        }
        Ok(Head {
            classes,
            inputs,
            weights,
            bias,
        })
    }

    pub fn weight(&self, class: usize, input: usize) -> f64 {
        self.weights[class * self.inputs + input]
    }

    pub fn logits(&self, z: &[f64]) -> Vec<f64> {
        (0..self.classes)
            .map(|c| {
                let row = &self.weights[c * self.inputs..(c + 1) * self.inputs];
                self.bias[c] + row.iter().zip(z).map(|(w, x)| w * x).sum::<f64>()
            })
            .collect()
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Cross-entropy `-ln max(p[label], 1e-12)`.
pub fn loss(p: &[f64], label: usize) -> Result<f64> {
    let pl = *p.get(label).ok_or(Error::LabelOutOfRange {
        label,
        classes: p.len(),
    })?;
    Ok(-pl.max(PROB_FLOOR).ln())
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridModel {
    pub spec: MicroCircuitSpec,
    pub angles: Angles,
    pub head: Head,
}

/// Gradient of the loss for one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    /// In `spec.slots()` order.
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub loss: f64,
    pub correct: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 3,
            learning_rate: 0.01,
            batch_size: 32,
            optimizer: Optimizer::adam(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidTrainConfig(format!(
                "learning rate {} must be finite and >= 0",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidTrainConfig("batch size must be >= 1".into()));
        }
        if let Optimizer::Adam { beta1, beta2, eps } = self.optimizer {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || eps <= 0.0 {
                return Err(Error::InvalidTrainConfig(
                    "Adam needs betas in [0,1) and eps > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub loss: Vec<f64>,
    pub accuracy: Vec<f64>,
}

impl HybridModel {
    pub fn new(spec: MicroCircuitSpec, angles: Angles, head: Head) -> Result<Self> {
        if angles.len() != spec.slots().len() || spec.slots().iter().any(|s| !angles.contains_key(s)) {
            return Err(Error::ShapeMismatch(
                "angle keys must equal the circuit's slot set".into(),
            ));
        }
        if head.inputs != spec.n_qubits() {
            return Err(Error::ShapeMismatch(format!(
                "head reads {} inputs but the circuit has {} qubits",
                head.inputs,
                spec.n_qubits()
            )));
        }
        Ok(HybridModel { spec, angles, head })
    }

    pub fn classes(&self) -> usize {
        self.head.classes
    }

    /// `(z, p)` for one input.
    pub fn forward_full<R: Rng + ?Sized>(
        &self,
        features: &[f64],
        backend: &BackendConfig,
        rng: &mut R,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let z = execute(&self.spec, features, &self.angles, backend, rng)?.z;
        let p = softmax(&self.head.logits(&z));
        Ok((z, p))
    }

    /// Class probabilities.
    pub fn forward<R: Rng + ?Sized>(&self, features: &[f64], backend: &BackendConfig, rng: &mut R) -> Result<Vec<f64>> {
        Ok(self.forward_full(features, backend, rng)?.1)
    }

    fn check_label(&self, label: usize) -> Result<()> {
        if label < self.classes() {
            Ok(())
        } else {
            Err(Error::LabelOutOfRange {
                label,
                classes: self.classes(),
            })
        }
    }

    /// `dL/dz = W^T (p - onehot)`.
    fn loss_wrt_z(&self, p: &[f64], label: usize) -> Vec<f64> {
        let n = self.head.inputs;
        let mut dz = vec![0.0; n];
        for (c, &pc) in p.iter().enumerate() {
            let delta = pc - if c == label { 1.0 } else { 0.0 };
            for (i, d) in dz.iter_mut().enumerate() {
                *d += delta * self.head.weight(c, i);
            }
        }
        dz
    }

    /// `dL/dθ_s` per slot via parameter shift.
    pub fn grad_quantum<R: Rng + ?Sized>(
        &self,
        features: &[f64],
        label: usize,
        backend: &BackendConfig,
        rng: &mut R,
    ) -> Result<Angles> {
        self.check_label(label)?;
        let (_, p) = self.forward_full(features, backend, rng)?;
        let dz = self.loss_wrt_z(&p, label);
        let grads = self.shift_gradients(features, &dz, backend, rng)?;
        Ok(self.spec.slots().iter().copied().zip(grads).collect())
    }

    fn shift_gradients<R: Rng + ?Sized>(
        &self,
        features: &[f64],
        dz: &[f64],
        backend: &BackendConfig,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let mut shifted = self.angles.clone();
        let mut out = Vec::with_capacity(self.spec.slots().len());
        for slot in self.spec.slots() {
            let theta = self.angles[slot];
            shifted.insert(*slot, theta + FRAC_PI_2);
            let plus = execute(&self.spec, features, &shifted, backend, rng)?.z;
            shifted.insert(*slot, theta - FRAC_PI_2);
            let minus = execute(&self.spec, features, &shifted, backend, rng)?.z;
            shifted.insert(*slot, theta);
            out.push(
                plus.iter()
                    .zip(&minus)
                    .zip(dz)
                    .map(|((a, b), d)| d * (a - b) / 2.0)
                    .sum(),
            );
        }
        Ok(out)
    }

    /// `(dL/dW, dL/db) = ((p - onehot) z^T, p - onehot)`.
    pub fn grad_head<R: Rng + ?Sized>(
        &self,
        features: &[f64],
        label: usize,
        backend: &BackendConfig,
        rng: &mut R,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_label(label)?;
        let (z, p) = self.forward_full(features, backend, rng)?;
        Ok(head_gradient(&z, &p, label))
    }

    /// Full gradient for one sample from a single forward pass.
    pub fn gradients<R: Rng + ?Sized>(
        &self,
        features: &[f64],
        label: usize,
        backend: &BackendConfig,
        rng: &mut R,
    ) -> Result<Gradients> {
        self.check_label(label)?;
        let (z, p) = self.forward_full(features, backend, rng)?;
        let dz = self.loss_wrt_z(&p, label);
        let angles = self.shift_gradients(features, &dz, backend, rng)?;
        let (weights, bias) = head_gradient(&z, &p, label);
        Ok(Gradients {
            angles,
            weights,
            bias,
            loss: loss(&p, label)?,
            correct: argmax(&p) == label,
        })
    }

    /// Accuracy with lowest-index argmax tie-breaking.
    pub fn evaluate<R: Rng + ?Sized>(
        &self,
        data: &EncodedDataset,
        backend: &BackendConfig,
        rng: &mut R,
    ) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut correct = 0usize;
        for (x, &y) in data.features.iter().zip(&data.labels) {
            if argmax(&self.forward(x, backend, rng)?) == y {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }

    /// Flat parameter vector: angles in slot order, then weights, then bias.
    pub fn parameters(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.spec.slots().iter().map(|s| self.angles[s]).collect();
        v.extend_from_slice(&self.head.weights);
        v.extend_from_slice(&self.head.bias);
        v
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        let k = self.spec.slots().len();
        let w = self.head.weights.len();
        for (slot, value) in self.spec.slots().iter().zip(params) {
            self.angles.insert(*slot, *value);
        }
        self.head.weights.copy_from_slice(&params[k..k + w]);
        self.head.bias.copy_from_slice(&params[k + w..]);
    }

    /// Content digest of every parameter and the circuit.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.spec).expect("spec serialises"));
        for p in self.parameters() {
            h.update(p.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Mini-batch training; the input model is left untouched.
    pub fn train(
        &self,
        data: &EncodedDataset,
        config: &TrainConfig,
        backend: &BackendConfig,
    ) -> Result<(HybridModel, TrainHistory)> {
        config.validate()?;
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut model = self.clone();
        let mut params = model.parameters();
        let mut opt = OptimizerState::new(config.optimizer, params.len());
        let mut shuffle_rng = rng::stream(config.seed, &[0]);
        let mut sample_rng = rng::stream(config.seed, &[rng::tag::SHOTS, backend.seed()]);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut history = TrainHistory::default();

        for _ in 0..config.epochs {
            order.shuffle(&mut shuffle_rng);
            let (mut loss_sum, mut correct) = (0.0, 0usize);
            for batch in order.chunks(config.batch_size) {
                let mut grad = vec![0.0; params.len()];
                for &i in batch {
                    let g = model.gradients(&data.features[i], data.labels[i], backend, &mut sample_rng)?;
                    loss_sum += g.loss;
                    correct += g.correct as usize;
                    for (acc, v) in grad.iter_mut().zip(g.angles.iter().chain(&g.weights).chain(&g.bias)) {
                        *acc += v;
                    }
                }
                let scale = 1.0 / batch.len() as f64;
                grad.iter_mut().for_each(|g| *g *= scale);
                opt.step(&mut params, &grad, config.learning_rate);
                model.set_parameters(&params);
            }
            history.loss.push(loss_sum / data.len() as f64);
            history.accuracy.push(correct as f64 / data.len() as f64);
        }
        Ok((model, history))
    }
}

fn head_gradient(z: &[f64], p: &[f64], label: usize) -> (Vec<f64>, Vec<f64>) {
    let delta: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(c, pc)| pc - if c == label { 1.0 } else { 0.0 })
        .collect();
    let weights = delta.iter().flat_map(|d| z.iter().map(move |zi| d * zi)).collect();
    (weights, delta)
}

struct OptimizerState {
    kind: Optimizer,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl OptimizerState {
    fn new(kind: Optimizer, len: usize) -> Self {
        OptimizerState {
            kind,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        match self.kind {
            Optimizer::Sgd => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= lr * g;
                }
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                self.t += 1;
                let c1 = 1.0 - beta1.powi(self.t);
                let c2 = 1.0 - beta2.powi(self.t);
                for (i, p) in params.iter_mut().enumerate() {
                    let g = grad[i];
                    self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
                    self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
                    let m_hat = self.m[i] / c1;
                    let v_hat = self.v[i] / c2;
                    *p -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
    }
}
