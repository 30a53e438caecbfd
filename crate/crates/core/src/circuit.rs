//! Chromosome to circuit mapping.
//!
//! Layer ℓ of a chromosome places `gℓR` RX gates on wires `0..gℓR`, each
//! bound to the shared slot `(ℓ, wire)`, followed by `gℓC` CNOTs on the
//! ring `j -> (j + 1) mod n` for `j = 0..gℓC`. Slots are positional, so
//! any two chromosomes that both place an RX at `(ℓ, wire)` share that
//! parameter in the pool.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chromosome::{Chromosome, MAX_LAYERS};
use crate::error::{Error, Result};
use crate::sim::{check_qubits, GateOp};

/// Identity of a trainable rotation: 1-based layer, 0-based wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotId {
    pub layer: usize,
    pub wire: usize,
}

impl fmt::Display for SlotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.layer, self.wire)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub rx: usize,
    pub cnot: usize,
}

impl fmt::Display for ResourceCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} RX, {} CNOT", self.rx, self.cnot)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroCircuitSpec {
    n_qubits: usize,
    gates: Vec<GateOp>,
    slots: Vec<SlotId>,
}

impl MicroCircuitSpec {
    /// A circuit with no gates.
    pub fn empty(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(MicroCircuitSpec {
            n_qubits,
            gates: Vec::new(),
            slots: Vec::new(),
        })
    }

    /// Arbitrary gate list; slots are collected from the RX gates in order.
    pub fn from_gates(n_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut slots = Vec::new();
        for g in &gates {
            g.validate(n_qubits)?;
            if let GateOp::Rx { slot, .. } = g {
                if slots.contains(slot) {
                    return Err(Error::ShapeMismatch(format!("slot {slot} used twice")));
                }
                slots.push(*slot);
            }
        }
        Ok(MicroCircuitSpec { n_qubits, gates, slots })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    /// One slot per RX, in gate order.
    pub fn slots(&self) -> &[SlotId] {
        &self.slots
    }

    pub fn resources(&self) -> ResourceCount {
        let rx = self.slots.len();
        ResourceCount {
            rx,
            cnot: self.gates.len() - rx,
        }
    }

    /// Text diagram, one line per wire.
    pub fn diagram(&self) -> String {
        const CELL: usize = 9;
        let mut lines: Vec<String> = (0..self.n_qubits).map(|w| format!("q{w}: ")).collect();
        let pad = lines.iter().map(|l| l.len()).max().unwrap_or(0);
        for l in &mut lines {
            while l.len() < pad {
                l.push(' ');
            }
            l.push('-');
        }
        for gate in &self.gates {
            for (wire, line) in lines.iter_mut().enumerate() {
                let label = match *gate {
                    GateOp::Rx { wire: w, slot } if w == wire => format!("RX{slot}"),
                    GateOp::Cnot { control, .. } if control == wire => "*".to_string(),
                    GateOp::Cnot { target, .. } if target == wire => "X".to_string(),
                    GateOp::Cnot { control, target } if wire > control.min(target) && wire < control.max(target) => {
                        "|".to_string()
                    }
                    _ => String::new(),
                };
                let fill = CELL - label.len();
                line.push_str(&"-".repeat(fill / 2));
                line.push_str(&label);
                line.push_str(&"-".repeat(fill - fill / 2));
            }
        }
        lines.join("\n")
    }
}

impl fmt::Display for MicroCircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.diagram())
    }
}

fn check_structure(ch: &Chromosome) -> Result<()> {
    let depth = ch.depth();
    if depth == 0 || depth > MAX_LAYERS {
        return Err(Error::InvalidChromosome {
            genes: *ch.genes(),
            reason: format!("depth gene must be in 1..={MAX_LAYERS}"),
        });
    }
    Ok(())
}

pub fn build(ch: &Chromosome, n_qubits: usize) -> Result<MicroCircuitSpec> {
    check_qubits(n_qubits)?;
    check_structure(ch)?;
    let mut gates = Vec::new();
    let mut slots = Vec::new();
    for layer in 1..=ch.depth() {
        let (rx, cnot) = ch.layer(layer);
        for width in [rx, cnot] {
            if width as usize > n_qubits {
                return Err(Error::WidthExceedsQubits { width, n_qubits });
            }
        }
        if cnot > 0 && n_qubits < 2 {
            return Err(Error::WidthExceedsQubits { width: cnot, n_qubits });
        }
        for wire in 0..rx as usize {
            let slot = SlotId { layer, wire };
            gates.push(GateOp::Rx { wire, slot });
            slots.push(slot);
        }
        for j in 0..cnot as usize {
            gates.push(GateOp::Cnot {
                control: j % n_qubits,
                target: (j + 1) % n_qubits,
            });
        }
    }
    Ok(MicroCircuitSpec { n_qubits, gates, slots })
}

/// Trainable rotation count: the sum of active RX widths.
pub fn param_count(ch: &Chromosome) -> usize {
    resource_count(ch).rx
}

pub fn resource_count(ch: &Chromosome) -> ResourceCount {
    let depth = ch.depth().min(MAX_LAYERS);
    (1..=depth).fold(ResourceCount { rx: 0, cnot: 0 }, |acc, layer| {
        let (rx, cnot) = ch.layer(layer);
        ResourceCount {
            rx: acc.rx + rx as usize,
            cnot: acc.cnot + cnot as usize,
        }
    })
}
