use num_complex::Complex64;

use super::{Expectations, QuantumState};
use crate::error::{Error, Result};

/// Mixed `n`-qubit state as a row-major `2^n x 2^n` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    n_qubits: usize,
    dim: usize,
    rho: Vec<Complex64>,
}

impl DensityState {
    pub fn from_pure(state: &QuantumState) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut rho = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                rho.push(a * b.conj());
            }
        }
        DensityState {
            n_qubits: state.n_qubits(),
            dim,
            rho,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim + col]
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
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

    /// `rho -> U rho U^dagger` with `U = exp(-i theta X / 2)` on `wire`.
    pub fn apply_rx(&mut self, wire: usize, theta: f64) -> Result<()> {
        self.check_wire(wire)?;
        let (s, c) = (theta / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s);
        let pis = Complex64::new(0.0, s);
        let bit = 1usize << wire;
        let d = self.dim;
        // left multiplication mixes row pairs
        for i in (0..d).filter(|i| i & bit == 0) {
            let j = i | bit;
            for col in 0..d {
                let (a, b) = (self.rho[i * d + col], self.rho[j * d + col]);
                self.rho[i * d + col] = a * c + b * mis;
                self.rho[j * d + col] = a * mis + b * c;
            }
        }
        // right multiplication by U^dagger mixes column pairs
        for row in 0..d {
            let r = &mut self.rho[row * d..(row + 1) * d];
            for i in (0..d).filter(|i| i & bit == 0) {
                let j = i | bit;
                let (a, b) = (r[i], r[j]);
                r[i] = a * c + b * pis;
                r[j] = a * pis + b * c;
            }
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
        let perm = |k: usize| if k & cbit != 0 { k ^ tbit } else { k };
        let d = self.dim;
        let old = self.rho.clone();
        for row in 0..d {
            let src = perm(row) * d;
            for col in 0..d {
                self.rho[row * d + col] = old[src + perm(col)];
            }
        }
        Ok(())
    }

    /// Single-qubit depolarizing channel on `wire`:
    /// `rho -> (1 - p) rho + p (Tr_wire rho) (x) I/2`.
    pub fn depolarize(&mut self, wire: usize, p: f64) -> Result<()> {
        self.check_wire(wire)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Backend(format!("depolarizing probability {p} outside [0, 1]")));
        }
        let bit = 1usize << wire;
        let d = self.dim;
        let old = self.rho.clone();
        for row in 0..d {
            for col in 0..d {
                let mixed = if (row ^ col) & bit == 0 {
                    let (r0, c0) = (row & !bit, col & !bit);
                    0.5 * (old[r0 * d + c0] + old[(r0 | bit) * d + (c0 | bit)])
                } else {
                    Complex64::new(0.0, 0.0)
                };
                self.rho[row * d + col] = old[row * d + col] * (1.0 - p) + mixed * p;
            }
        }
        Ok(())
    }

    pub fn expectation_z(&self) -> Expectations {
        let mut z = vec![0.0; self.n_qubits];
        for basis in 0..self.dim {
            let p = self.get(basis, basis).re;
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
}
