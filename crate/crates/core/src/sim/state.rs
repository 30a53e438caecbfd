use num_complex::Complex64;
use rand::Rng;

use super::{check_qubits, Expectations};
use crate::error::{Error, Result};

const ENCODE_NORM_TOL: f64 = 1e-6;

/// Pure `n`-qubit state; `amps.len() == 2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { n_qubits, amps })
    }

    /// Loads a unit-norm real vector as the amplitudes of an `n`-qubit state.
    ///
    /// The input must be normalised to within 1e-6; the stored amplitudes
    /// are renormalised exactly.
    pub fn amplitude_encode(features: &[f64], n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if features.len() != dim {
            return Err(Error::WrongLength {
                expected: dim,
                got: features.len(),
            });
        }
        let norm = features.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > ENCODE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let amps = features.iter().map(|&x| Complex64::new(x / norm, 0.0)).collect();
        Ok(QuantumState { n_qubits, amps })
    }

    /// Wraps raw amplitudes, checking length and normalisation.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::WrongLength {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        let state = QuantumState { n_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > ENCODE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire < self.n_qubits {
            Ok(())
        } else {
            Err(Error::WireOutOfRange {
                wire,
                n_qubits: self.n_qubits,
            })
        }
    }

    /// `exp(-i theta X / 2)` on `wire`.
    pub fn apply_rx(&mut self, wire: usize, theta: f64) -> Result<()> {
        self.check_wire(wire)?;
        let (s, c) = (theta / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s);
        let bit = 1usize << wire;
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = a * c + b * mis;
            self.amps[j] = a * mis + b * c;
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_wire(control)?;
        self.check_wire(target)?;
        if control == target {
            return Err(Error::ControlEqualsTarget(control));
        }
        let (cbit, tbit) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            // visit each swapped pair once, from its target-clear member
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn expectation_z(&self) -> Expectations {
        let mut z = vec![0.0; self.n_qubits];
        for (basis, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            for (qubit, zq) in z.iter_mut().enumerate() {
                if basis >> qubit & 1 == 0 {
                    *zq += p;
                } else {
                    *zq -= p;
                }
            }
        }
        Expectations { z }
    }

    /// Draws `shots` basis indices from `|amp|^2`; returns a histogram of
    /// length `2^n` summing to `shots`.
    pub fn sample_bitstrings<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for p in self.probabilities() {
            acc += p;
            cdf.push(acc);
        }
        let total = acc;
        let mut counts = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            let u = rng.random::<f64>() * total;
            // first index whose cumulative mass exceeds u; skips zero-mass states
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            counts[idx] += 1;
        }
        Ok(counts)
    }
}
