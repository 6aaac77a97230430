//! Stabilizer projector decompositions (SPDs): real-weighted sums of
//! stabilizer projectors, their norms, L1-optimal construction, and
//! propagation through Clifford gates and rotation channels.

mod channels;
mod optimize;

pub use channels::{apply_rotation_via_channels, rotation_channel_terms};
pub use optimize::{
    enumerate_projectors, optimal_spd, optimal_spd_for, optimal_spd_from_coefficients, pauli_coefficients, sparsify, LexMethod, Objective,
    SparsifyOptions,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Gate;
use crate::clifford::{CliffordError, CliffordTableau};
use crate::dense::{self, DenseError, DenseOperator};
use crate::lp::LpError;
use crate::numeric::TOL;
use crate::pauli::SignedPauli;
use crate::stabilizer::{StabilizerError, StabilizerProjector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpdError {
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("operator is not between 0 and I (eigenvalues in [{min:.3e}, {max:.3e}])")]
    OutOfRange { min: f64, max: f64 },
    #[error("exhaustive optimization supports at most 3 qubits, got {0}")]
    TooManyQubits(usize),
    #[error("reconstruction error {0:.3e} exceeds tolerance")]
    Reconstruction(f64),
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// One weighted projector of an SPD.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdTerm {
    pub coeff: f64,
    pub proj: StabilizerProjector,
}

/// `ν = Σ|a_i|` and `ν* = Σ|a_i| tr A_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpdNorms {
    pub nu: f64,
    pub nu_star: f64,
}

/// A stabilizer projector decomposition on `n` qubits. Projectors are unique
/// and coefficients non-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Spd {
    n: usize,
    terms: Vec<SpdTerm>,
}

impl Spd {
    /// The empty SPD (the zero operator).
    pub fn zero(n: usize) -> Self {
        Spd { n, terms: Vec::new() }
    }

    pub fn single(coeff: f64, proj: StabilizerProjector) -> Self {
        let n = proj.num_qubits();
        Spd::from_terms(n, vec![(coeff, proj)])
    }

    /// Merges duplicate projectors and drops negligible coefficients. Terms
    /// are ordered by projector.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (f64, StabilizerProjector)>) -> Self {
        let mut merged: BTreeMap<StabilizerProjector, f64> = BTreeMap::new();
        for (c, p) in terms {
            debug_assert_eq!(p.num_qubits(), n);
            *merged.entry(p).or_insert(0.0) += c;
        }
        // Weighting by rank keeps tiny coefficients on large projectors, as in
        // a trace-normalized input on many qubits.
        let terms = merged
            .into_iter()
            .filter(|(p, c)| c.abs() * p.trace() > TOL.coeff_drop)
            .map(|(proj, coeff)| SpdTerm { coeff, proj })
            .collect();
        Spd { n, terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[SpdTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norms(&self) -> SpdNorms {
        let nu = self.terms.iter().map(|t| t.coeff.abs()).sum();
        let nu_star = self.terms.iter().map(|t| t.coeff.abs() * t.proj.trace()).sum();
        SpdNorms { nu, nu_star }
    }

    /// `tr(Σ a_i A_i)`.
    pub fn trace(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.proj.trace()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Spd {
        Spd::from_terms(self.n, self.terms.iter().map(|t| (t.coeff * factor, t.proj.clone())))
    }

    /// Sum of two SPDs on the same register.
    pub fn merged(&self, other: &Spd) -> Result<Spd, SpdError> {
        if self.n != other.n {
            return Err(SpdError::QubitMismatch(self.n, other.n));
        }
        Ok(Spd::from_terms(self.n, self.terms.iter().chain(&other.terms).map(|t| (t.coeff, t.proj.clone()))))
    }

    /// `Σ a_i A_i` as a dense matrix.
    pub fn reconstruct(&self) -> Result<DenseOperator, SpdError> {
        self.reconstruct_capped(TOL.dense_cap)
    }

    pub fn reconstruct_capped(&self, cap: usize) -> Result<DenseOperator, SpdError> {
        dense::check_cap(self.n, cap)?;
        let mut out = DenseOperator::zeros(1 << self.n);
        for t in &self.terms {
            out.add_scaled(t.coeff, &t.proj.to_dense());
        }
        Ok(out)
    }

    /// Applies `f` to every generator of every projector.
    pub fn map_projectors<F>(&self, n: usize, f: F) -> Spd
    where
        F: Fn(&StabilizerProjector) -> StabilizerProjector,
    {
        Spd::from_terms(n, self.terms.iter().map(|t| (t.coeff, f(&t.proj))))
    }

    /// `U 𝒜 U†` for a Clifford gate.
    pub fn conjugate_gate(&self, gate: &Gate) -> Result<Spd, SpdError> {
        if !gate.is_clifford() {
            return Err(CliffordError::NonClifford(gate.clone()).into());
        }
        Ok(self.map_projectors(self.n, |p| p.map_generators(|g| gate.conjugate(g).expect("Clifford gate"))))
    }

    /// `U 𝒜 U†` for the map recorded in `t`.
    pub fn conjugate_tableau(&self, t: &CliffordTableau) -> Result<Spd, SpdError> {
        if t.num_qubits() != self.n {
            return Err(SpdError::QubitMismatch(self.n, t.num_qubits()));
        }
        Ok(self.map_projectors(self.n, |p| p.map_generators(|g| t.conjugate(g).expect("same register"))))
    }

    /// Embeds into `n` qubits (local qubit `k` on `wires[k]`), tensoring with
    /// the identity on the other wires.
    pub fn embed(&self, n: usize, wires: &[usize]) -> Spd {
        self.map_projectors(n, |p| p.embed(n, wires))
    }

    /// Text rendering with one `coeff <generators>` term per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("spd {}\n", self.n);
        for t in &self.terms {
            s.push_str(&format!("{:?} {}\n", t.coeff, t.proj));
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    coeff: f64,
    generators: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SpdDoc {
    n: usize,
    terms: Vec<TermDoc>,
}

impl Serialize for Spd {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let doc = SpdDoc {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| TermDoc {
                    coeff: t.coeff,
                    generators: t.proj.generators().iter().map(|g| g.to_string()).collect(),
                })
                .collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Spd {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = SpdDoc::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let gens = t
                .generators
                .iter()
                .map(|g| SignedPauli::parse(g, doc.n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(serde::de::Error::custom)?;
            let proj = StabilizerProjector::canonicalize(doc.n, &gens).map_err(serde::de::Error::custom)?;
            terms.push((t.coeff, proj));
        }
        Ok(Spd::from_terms(doc.n, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proj(s: &str, n: usize) -> StabilizerProjector {
        StabilizerProjector::parse(s, n).unwrap()
    }

    #[test]
    fn norms_examples() {
        let s = Spd::single(1.0, proj("<Z1>", 1));
        assert_eq!(s.norms(), SpdNorms { nu: 1.0, nu_star: 1.0 });
        let s = Spd::single(0.25, proj("<Z2>", 3));
        assert_eq!(s.norms(), SpdNorms { nu: 0.25, nu_star: 1.0 });
        let s = Spd::from_terms(1, [(0.5, proj("<Z1>", 1)), (-0.5, proj("<X1>", 1))]);
        assert_eq!(s.norms(), SpdNorms { nu: 1.0, nu_star: 1.0 });
    }

    #[test]
    fn duplicates_merge_and_cancel() {
        let a = proj("<Z1>", 1);
        let b = proj("<X1>", 1);
        let s = Spd::from_terms(1, [(0.5, a.clone()), (0.5, b.clone()), (0.5, a.clone()), (-0.5, b)]);
        assert_eq!(s, Spd::single(1.0, a));
    }

    #[test]
    fn reconstruct_basics() {
        let z = Spd::single(1.0, proj("<Z1>", 1)).reconstruct().unwrap();
        assert!((z.get(0, 0).re - 1.0).abs() < 1e-12 && z.get(1, 1).norm() < 1e-12);
        assert_eq!(Spd::zero(2).reconstruct().unwrap(), DenseOperator::zeros(4));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = Spd::from_terms(2, [(0.1 + 0.2, proj("<-X1,Z2>", 2)), (-1.0 / 3.0, proj("<Y1*Y2>", 2))]);
        let text = serde_json::to_string(&s).unwrap();
        let back: Spd = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
