//! Central finite differences of the per-sample loss over the flat
//! parameter vector (angles in slot order, then head weights, then bias).

use evoqnn_core::model::{loss, softmax};
use evoqnn_core::HybridModel;

use super::dense;

pub const STEP: f64 = 1e-5;

/// Cross-entropy of one sample, computed through the dense oracle.
pub fn oracle_loss(model: &HybridModel, features: &[f64], label: usize) -> f64 {
    let amps = dense::run(&model.spec, &model.angles, features);
    let z = dense::expectation_z(&amps, model.spec.n_qubits());
    loss(&softmax(&model.head.logits(&z)), label).unwrap()
}

pub fn gradient(model: &HybridModel, features: &[f64], label: usize) -> Vec<f64> {
    let base = model.parameters();
    let mut probe = model.clone();
    (0..base.len())
        .map(|i| {
            let mut p = base.clone();
            p[i] = base[i] + STEP;
            probe.set_parameters(&p);
            let up = oracle_loss(&probe, features, label);
            p[i] = base[i] - STEP;
            probe.set_parameters(&p);
            let down = oracle_loss(&probe, features, label);
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

/// Relative error, falling back to an absolute bound for tiny gradients.
pub fn agrees(analytic: f64, numeric: f64, rel: f64, abs: f64) -> bool {
    let diff = (analytic - numeric).abs();
    diff <= abs || diff <= rel * analytic.abs().max(numeric.abs())
}
