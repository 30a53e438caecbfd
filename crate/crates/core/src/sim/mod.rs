//! Circuit execution.
//!
//! Basis-state convention: bit `i` of a basis index is the value of qubit
//! `i`, so qubit 0 is the least significant bit. Every backend in this
//! module, and every oracle in the tests, uses that convention.
//!
//! Three interchangeable backends are provided:
//!
//! - [`BackendConfig::Exact`]: statevector evolution, analytic `<Z_i>`.
//! - [`BackendConfig::Shots`]: statevector evolution, then `shots` basis
//!   bitstrings sampled from `|amp|^2`; `<Z_i>` is the sample mean of the
//!   `+/-1` outcome of qubit `i` over those shared bitstrings.
//! - [`BackendConfig::Noisy`]: density-matrix evolution with a
//!   single-qubit depolarizing channel applied to every wire a gate touches,
//!   right after that gate.

mod density;
mod state;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use density::DensityState;
pub use state::QuantumState;

use crate::circuit::{MicroCircuitSpec, SlotId};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 10;

pub const DEFAULT_SHOTS: u32 = 1024;
pub const DEFAULT_NOISE_P: f64 = 0.01;

/// Slot to rotation angle (radians).
pub type Angles = std::collections::BTreeMap<SlotId, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOp {
    Rx { wire: usize, slot: SlotId },
    Cnot { control: usize, target: usize },
}

impl GateOp {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |wire: usize| {
            if wire < n_qubits {
                Ok(())
            } else {
                Err(Error::WireOutOfRange { wire, n_qubits })
            }
        };
        match *self {
            GateOp::Rx { wire, .. } => check(wire),
            GateOp::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::ControlEqualsTarget(control));
                }
                Ok(())
            }
        }
    }

    /// Wires the gate acts on.
    pub fn wires(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            GateOp::Rx { wire, .. } => (wire, None),
            GateOp::Cnot { control, target } => (control, Some(target)),
        };
        std::iter::once(a).chain(b)
    }
}

/// One Pauli-Z expectation value per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub z: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendConfig {
    Exact,
    /// `seed` roots the sampling streams callers derive for this backend.
    Shots {
        shots: u32,
        seed: u64,
    },
    Noisy {
        p: f64,
    },
}

impl BackendConfig {
    pub fn shots(shots: u32, seed: u64) -> Self {
        BackendConfig::Shots { shots, seed }
    }

    pub fn noisy(p: f64) -> Self {
        BackendConfig::Noisy { p }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BackendConfig::Exact => Ok(()),
            BackendConfig::Shots { shots: 0, .. } => Err(Error::ZeroShots),
            BackendConfig::Shots { .. } => Ok(()),
            BackendConfig::Noisy { p } if !(0.0..1.0).contains(&p) => Err(Error::Backend(format!(
                "depolarizing probability {p} is outside [0, 1)"
            ))),
            BackendConfig::Noisy { .. } => Ok(()),
        }
    }

    /// True when repeated executions give bit-identical results.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, BackendConfig::Shots { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BackendConfig::Exact => "exact",
            BackendConfig::Shots { .. } => "shots",
            BackendConfig::Noisy { .. } => "noisy",
        }
    }

    /// Root seed for sampling streams; zero for deterministic backends.
    pub fn seed(&self) -> u64 {
        match *self {
            BackendConfig::Shots { seed, .. } => seed,
            _ => 0,
        }
    }
}

fn angle_for(angles: &Angles, slot: SlotId) -> Result<f64> {
    angles.get(&slot).copied().ok_or(Error::MissingSlot(slot))
}

/// Runs `spec` on amplitude-encoded `features` and returns `<Z_i>` per qubit.
///
/// `rng` is only drawn from by the shot backend.
pub fn execute<R: Rng + ?Sized>(
    spec: &MicroCircuitSpec,
    features: &[f64],
    angles: &Angles,
    backend: &BackendConfig,
    rng: &mut R,
) -> Result<Expectations> {
    backend.validate()?;
    // Fail on a missing slot before doing any work.
    for slot in spec.slots() {
        angle_for(angles, *slot)?;
    }
    let n = spec.n_qubits();
    match *backend {
        BackendConfig::Exact => Ok(evolve(spec, features, angles)?.expectation_z()),
        BackendConfig::Shots { shots, .. } => {
            let state = evolve(spec, features, angles)?;
            let counts = state.sample_bitstrings(shots as usize, rng)?;
            Ok(z_from_counts(&counts, n, shots as usize))
        }
        BackendConfig::Noisy { p } => Ok(evolve_density(spec, features, angles, p)?.expectation_z()),
    }
}

/// Final density matrix with a depolarizing channel of strength `p` on
/// every wire a gate touches, right after that gate.
pub fn evolve_density(spec: &MicroCircuitSpec, features: &[f64], angles: &Angles, p: f64) -> Result<DensityState> {
    let mut rho = DensityState::from_pure(&QuantumState::amplitude_encode(features, spec.n_qubits())?);
    for gate in spec.gates() {
        match *gate {
            GateOp::Rx { wire, slot } => rho.apply_rx(wire, angle_for(angles, slot)?)?,
            GateOp::Cnot { control, target } => rho.apply_cnot(control, target)?,
        }
        if p > 0.0 {
            for wire in gate.wires() {
                rho.depolarize(wire, p)?;
            }
        }
    }
    Ok(rho)
}

/// Final statevector of `spec` on amplitude-encoded `features`.
pub fn evolve(spec: &MicroCircuitSpec, features: &[f64], angles: &Angles) -> Result<QuantumState> {
    let mut state = QuantumState::amplitude_encode(features, spec.n_qubits())?;
    for gate in spec.gates() {
        match *gate {
            GateOp::Rx { wire, slot } => state.apply_rx(wire, angle_for(angles, slot)?)?,
            GateOp::Cnot { control, target } => state.apply_cnot(control, target)?,
        }
    }
    Ok(state)
}

/// Empirical `<Z_i>` from a histogram over basis indices.
pub fn z_from_counts(counts: &[u64], n_qubits: usize, shots: usize) -> Expectations {
    let mut z = vec![0.0; n_qubits];
    for (basis, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        for (qubit, zq) in z.iter_mut().enumerate() {
            if basis >> qubit & 1 == 0 {
                *zq += count as f64;
            } else {
                *zq -= count as f64;
            }
        }
    }
    for zq in &mut z {
        *zq /= shots as f64;
    }
    Expectations { z }
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedQubitCount(n))
    }
}
