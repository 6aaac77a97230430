//! Gaussian-elimination synthesis of Clifford circuits from tableaus.

use super::{CliffordError, CliffordTableau};
use crate::circuit::{Circuit, Gate};
use crate::pauli::SignedPauli;
use crate::stabilizer::StabilizerProjector;

/// Reduces a tableau to the identity by post-composing gates.
struct Reducer {
    t: CliffordTableau,
    applied: Vec<Gate>,
}

impl Reducer {
    fn push(&mut self, g: Gate) {
        self.t.apply_gate(&g).expect("synthesis emits Clifford gates only");
        self.applied.push(g);
    }

    /// `H S H`: fixes `X`, sends `Y` to `Z` up to sign.
    fn push_hsh(&mut self, q: usize) {
        self.push(Gate::H(q));
        self.push(Gate::S(q));
        self.push(Gate::H(q));
    }

    fn reduce_qubit(&mut self, j: usize) {
        let n = self.t.n;
        // Give the X image an X component on qubit j.
        let xi = self.t.x_images[j].clone();
        if !xi.x_bit(j) {
            let k = match (j..n).find(|&k| xi.x_bit(k)) {
                Some(k) => k,
                None => {
                    let k = (j..n).find(|&k| xi.z_bit(k)).expect("X image is non-trivial past j");
                    self.push(Gate::H(k));
                    k
                }
            };
            if k != j {
                self.push(Gate::cnot(k, j));
            }
        }
        let xi = self.t.x_images[j].clone();
        for k in j + 1..n {
            if xi.x_bit(k) {
                self.push(Gate::cnot(j, k));
            }
        }
        if self.t.x_images[j].z_bit(j) {
            self.push(Gate::S(j));
        }
        let xi = self.t.x_images[j].clone();
        let z_tail: Vec<usize> = (j + 1..n).filter(|&k| xi.z_bit(k)).collect();
        for &k in &z_tail {
            self.push(Gate::H(k));
        }
        for &k in &z_tail {
            self.push(Gate::cnot(j, k));
        }

        // The Z image now anticommutes with ±X_j only through qubit j.
        if self.t.z_images[j].x_bit(j) {
            self.push_hsh(j);
        }
        let zi = self.t.z_images[j].clone();
        let mut tail = Vec::new();
        for k in j + 1..n {
            match (zi.x_bit(k), zi.z_bit(k)) {
                (true, false) => self.push(Gate::H(k)),
                (true, true) => self.push_hsh(k),
                (false, true) => {}
                (false, false) => continue,
            }
            tail.push(k);
        }
        for k in tail {
            self.push(Gate::cnot(k, j));
        }
        if self.t.x_images[j].is_negative() {
            self.push(Gate::Z(j));
        }
        if self.t.z_images[j].is_negative() {
            self.push(Gate::X(j));
        }
    }
}

/// Circuit over `{H, S, CNOT, X, Z}` whose conjugation action equals the
/// tableau. Uses at most `8n² + 8n` gates.
pub fn tableau_to_circuit(t: &CliffordTableau) -> Circuit {
    let n = t.num_qubits();
    let mut r = Reducer { t: t.clone(), applied: Vec::new() };
    for j in 0..n {
        r.reduce_qubit(j);
    }
    debug_assert!(r.t.is_identity());
    // g_m ... g_1 T = I, so T = g_1† ... g_m†, applied g_m† first.
    let mut gates = Vec::with_capacity(r.applied.len());
    for g in r.applied.iter().rev() {
        match g {
            Gate::S(q) => {
                gates.push(Gate::S(*q));
                gates.push(Gate::Z(*q));
            }
            other => gates.push(other.inverse()),
        }
    }
    Circuit::from_gates(n, gates).expect("synthesized wires are in range")
}

/// Tableau of a Clifford `U_A` with `U_A (|0⟩⟨0|^{⊗k} ⊗ I) U_A† = A`, where the
/// leading `k` qubits are fixed to zero and the trailing qubits carry the rank.
pub fn projector_prep_tableau(a: &StabilizerProjector) -> Result<CliffordTableau, CliffordError> {
    let n = a.num_qubits();
    let pairs: Vec<_> =
        a.generators().iter().enumerate().map(|(j, g)| (SignedPauli::z_on(n, j), g.clone())).collect();
    CliffordTableau::from_pauli_map(n, &pairs)
}

/// Preparation circuit for a stabilizer projector; see [`projector_prep_tableau`].
pub fn projector_prep_circuit(a: &StabilizerProjector) -> Circuit {
    let t = projector_prep_tableau(a).expect("canonical generators are independent and commuting");
    tableau_to_circuit(&t)
}
