//! Circuit IR over Clifford gates and Pauli rotations, benchmark generators,
//! the single-gate fault model and the line-oriented text format.

mod format;
mod gate;
mod generators;

pub use format::{parse_circuit, serialize_circuit, ParseError};
pub use gate::{quarter_turns, wrap_angle, Gate};
pub use generators::{bv_circuit, qft_circuit, random_circuit, Benchmark};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("wire {wire} out of range for {n} qubits")]
    WireOutOfRange { wire: usize, n: usize },
    #[error("gate uses wire {0} twice")]
    RepeatedWire(usize),
    #[error("rotation Pauli must be non-identity")]
    IdentityRotation,
    #[error("fault site {site} out of range for {len} gates")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("replacement acts on wires {found:?}, fault gate acts on {expected:?}")]
    ReplacementWires { expected: Vec<usize>, found: Vec<usize> },
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
}

/// An ordered gate list on `n` qubits; the first gate is applied first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        self.validate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    fn validate(&self, gate: &Gate) -> Result<(), CircuitError> {
        if let Gate::Rotation { pauli, .. } = gate {
            if pauli.num_qubits() != self.n {
                return Err(CircuitError::WireOutOfRange { wire: pauli.num_qubits(), n: self.n });
            }
            if pauli.is_identity() {
                return Err(CircuitError::IdentityRotation);
            }
        }
        let wires = gate.wires();
        for (i, &w) in wires.iter().enumerate() {
            if w >= self.n {
                return Err(CircuitError::WireOutOfRange { wire: w, n: self.n });
            }
            if wires[..i].contains(&w) {
                return Err(CircuitError::RepeatedWire(w));
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Layer count of the as-soon-as-possible schedule.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            let wires = g.wires();
            let l = wires.iter().map(|&w| level[w]).max().unwrap_or(0) + 1;
            for w in wires {
                level[w] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    pub fn non_clifford_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_clifford()).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    /// Concatenation: `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        assert_eq!(self.n, other.n);
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Circuit { n: self.n, gates }
    }

    /// The inverse circuit (reversed order, inverted gates).
    pub fn inverse(&self) -> Circuit {
        Circuit { n: self.n, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    /// Gates `i..j` (0-based, half-open) as a circuit.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Circuit {
        Circuit { n: self.n, gates: self.gates[range].to_vec() }
    }

    /// Hex SHA-256 of the serialized text form.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(serialize_circuit(self).as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Single-gate fault models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FaultModel {
    /// The gate is replaced by the identity.
    MissingGate,
    /// The gate is replaced by the given gates on the same wires.
    ReplacedBy(Vec<Gate>),
}

impl FaultModel {
    /// Replacement gates for `gate` under this model.
    pub fn replacement(&self, gate: &Gate) -> Result<Vec<Gate>, CircuitError> {
        match self {
            FaultModel::MissingGate => Ok(Vec::new()),
            FaultModel::ReplacedBy(gs) => {
                let mut expected = gate.wires();
                expected.sort_unstable();
                for g in gs {
                    if g.wires().iter().any(|w| !expected.contains(w)) {
                        let mut found: Vec<usize> = gs.iter().flat_map(Gate::wires).collect();
                        found.sort_unstable();
                        found.dedup();
                        return Err(CircuitError::ReplacementWires { expected, found });
                    }
                }
                Ok(gs.clone())
            }
        }
    }
}

/// Copy of `c` with gate `site` replaced according to `fm`.
pub fn inject_fault(c: &Circuit, site: usize, fm: &FaultModel) -> Result<Circuit, CircuitError> {
    let gate = c.gates.get(site).ok_or(CircuitError::SiteOutOfRange { site, len: c.len() })?;
    let replacement = fm.replacement(gate)?;
    let mut gates = c.gates[..site].to_vec();
    gates.extend(replacement);
    gates.extend_from_slice(&c.gates[site + 1..]);
    Circuit::from_gates(c.n, gates)
}
