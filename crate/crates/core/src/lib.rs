//! Evolutionary training of a weight-shared quantum "macroCircuit" and
//! inference-time selection of the "microCircuits" it contains.
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: statevector, shot-sampled and density-matrix execution of
//!   RX/CNOT circuits with per-qubit Pauli-Z readout.
//! - [`chromosome`]: the five-gene architecture encoding and its genetic
//!   operators.
//! - [`circuit`]: chromosome to gate-list mapping and resource counting.
//! - [`pool`]: the shared parameter pool all microCircuits draw from.
//! - [`model`]: the hybrid quantum/linear classifier and its training loop.
//! - [`ga`]: the two evolutionary stages (training and frozen-pool inference).
//! - [`data`]: MNIST IDX ingestion, PCA and synthetic datasets.

pub mod chromosome;
pub mod circuit;
pub mod data;
pub mod error;
pub mod ga;
pub mod model;
pub mod pool;
pub mod rng;
pub mod sim;

pub use chromosome::{Chromosome, GeneBounds};
pub use circuit::{MicroCircuitSpec, ResourceCount, SlotId};
pub use error::{Error, Result};
pub use model::{HybridModel, TrainConfig};
pub use pool::{AggregationPolicy, ParameterPool};
pub use sim::{BackendConfig, Expectations, QuantumState};
