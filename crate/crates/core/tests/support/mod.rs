//! Helpers shared by the integration tests of both crates.
#![allow(dead_code)]

pub mod dense;
pub mod finite_diff;
pub mod tables;

use std::f64::consts::PI;

use evoqnn_core::chromosome::{random_chromosome, GeneBounds};
use evoqnn_core::sim::Angles;
use evoqnn_core::{Chromosome, MicroCircuitSpec};
use rand::Rng;

/// Uniform angles in `[-π, π]` for every slot of `spec`.
pub fn random_angles<R: Rng>(spec: &MicroCircuitSpec, rng: &mut R) -> Angles {
    spec.slots().iter().map(|s| (*s, rng.random_range(-PI..=PI))).collect()
}

/// A random unit vector of length `dim` with real entries.
pub fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

pub fn random_chromosome_for<R: Rng>(n_qubits: usize, rng: &mut R) -> Chromosome {
    random_chromosome(&GeneBounds::for_qubits(n_qubits).unwrap(), rng)
}
