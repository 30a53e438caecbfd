//! Brute-force circuit oracle: every gate becomes an explicit `2^n x 2^n`
//! matrix assembled from Kronecker products, and the circuit is their
//! product. Shares no code with the simulator.

use num_complex::Complex64;

use evoqnn_core::sim::{Angles, GateOp};
use evoqnn_core::MicroCircuitSpec;

pub type Matrix = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![ZERO; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn rx(theta: f64) -> Matrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![
        vec![Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        vec![Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]
}

pub fn pauli_x() -> Matrix {
    vec![vec![ZERO, ONE], vec![ONE, ZERO]]
}

fn projector(bit: usize) -> Matrix {
    let mut m = vec![vec![ZERO; 2]; 2];
    m[bit][bit] = ONE;
    m
}

/// `op` on `wire`, identity elsewhere. Qubit 0 is the least significant
/// bit, so it is the rightmost Kronecker factor.
pub fn embed(op: &Matrix, wire: usize, n_qubits: usize) -> Matrix {
    let mut out = identity(1);
    for q in (0..n_qubits).rev() {
        let factor = if q == wire { op.clone() } else { identity(2) };
        out = kron(&out, &factor);
    }
    out
}

/// `|0><0|_c ⊗ I + |1><1|_c ⊗ X_t`.
pub fn cnot(control: usize, target: usize, n_qubits: usize) -> Matrix {
    let idle = embed(&projector(0), control, n_qubits);
    let flip = matmul(
        &embed(&projector(1), control, n_qubits),
        &embed(&pauli_x(), target, n_qubits),
    );
    add(&idle, &flip)
}

pub fn circuit_unitary(spec: &MicroCircuitSpec, angles: &Angles) -> Matrix {
    let n = spec.n_qubits();
    let mut u = identity(1 << n);
    for gate in spec.gates() {
        let g = match *gate {
            GateOp::Rx { wire, slot } => embed(&rx(angles[&slot]), wire, n),
            GateOp::Cnot { control, target } => cnot(control, target, n),
        };
        u = matmul(&g, &u);
    }
    u
}

/// Final amplitudes of `spec` on the real input `features`.
pub fn run(spec: &MicroCircuitSpec, angles: &Angles, features: &[f64]) -> Vec<Complex64> {
    let v: Vec<Complex64> = features.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    apply(&circuit_unitary(spec, angles), &v)
}

/// `z_i = sum_b (-1)^{bit i of b} |amp_b|^2`.
pub fn expectation_z(amps: &[Complex64], n_qubits: usize) -> Vec<f64> {
    (0..n_qubits)
        .map(|q| {
            amps.iter()
                .enumerate()
                .map(|(b, a)| if (b >> q) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
                .sum()
        })
        .collect()
}

pub fn is_unitary(u: &Matrix, tol: f64) -> bool {
    let n = u.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let dot: Complex64 = (0..n).map(|k| u[k][i].conj() * u[k][j]).sum();
            let want = if i == j { ONE } else { ZERO };
            (dot - want).norm() <= tol
        })
    })
}
