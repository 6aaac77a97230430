//! Destabilizer/stabilizer state simulator for Clifford circuits.

use rand::Rng;

use super::{CliffordError, PhasedProduct};
use crate::circuit::{Circuit, Gate};
use crate::pauli::SignedPauli;

/// Pure stabilizer state in destabilizer form.
#[derive(Debug, Clone)]
pub struct StabilizerState {
    n: usize,
    destabilizers: Vec<SignedPauli>,
    stabilizers: Vec<SignedPauli>,
}

impl StabilizerState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        StabilizerState {
            n,
            destabilizers: (0..n).map(|q| SignedPauli::x_on(n, q)).collect(),
            stabilizers: (0..n).map(|q| SignedPauli::z_on(n, q)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[SignedPauli] {
        &self.stabilizers
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), CliffordError> {
        if !g.is_clifford() {
            return Err(CliffordError::NonClifford(g.clone()));
        }
        for row in self.destabilizers.iter_mut().chain(self.stabilizers.iter_mut()) {
            g.conjugate_in_place(row);
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<(), CliffordError> {
        c.gates().iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Computational-basis measurement of qubit `q`; returns the outcome bit.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let n = self.n;
        let Some(p) = (0..n).find(|&i| self.stabilizers[i].x_bit(q)) else {
            // Deterministic: ±Z_q is the product of stabilizers whose
            // destabilizer anticommutes with Z_q.
            let mut acc = PhasedProduct::identity(n);
            for i in 0..n {
                if self.destabilizers[i].x_bit(q) {
                    acc.mul(&self.stabilizers[i]);
                }
            }
            return acc.exponent() == 2;
        };
        let pivot = self.stabilizers[p].clone();
        for i in 0..n {
            if i != p && self.stabilizers[i].x_bit(q) {
                self.stabilizers[i] = self.stabilizers[i].product(&pivot).expect("stabilizers commute");
            }
            if i != p && self.destabilizers[i].x_bit(q) {
                let mut d = self.destabilizers[i].mul_phased(&pivot).expect("same register").1;
                d.set_negative(false);
                self.destabilizers[i] = d;
            }
        }
        let outcome: bool = rng.gen();
        self.destabilizers[p] = pivot;
        let mut z = SignedPauli::z_on(n, q);
        z.set_negative(outcome);
        self.stabilizers[p] = z;
        outcome
    }

    /// Measures `qubits` in order, stopping at the first `1`. Returns true when
    /// every outcome is `0`.
    pub fn measure_all_zero<R: Rng + ?Sized>(&mut self, qubits: impl IntoIterator<Item = usize>, rng: &mut R) -> bool {
        for q in qubits {
            if self.measure(q, rng) {
                return false;
            }
        }
        true
    }
}

/// Runs a Clifford circuit from `|0…0⟩` and measures every qubit, `shots` times.
pub fn clifford_simulate<R: Rng + ?Sized>(
    circuit: &Circuit,
    shots: usize,
    rng: &mut R,
) -> Result<Vec<Vec<bool>>, CliffordError> {
    let n = circuit.num_qubits();
    let mut prepared = StabilizerState::zero(n);
    prepared.apply_circuit(circuit)?;
    Ok((0..shots)
        .map(|_| {
            let mut s = prepared.clone();
            (0..n).map(|q| s.measure(q, rng)).collect()
        })
        .collect())
}
