//! Test pattern generation: the optimal local pattern of a fault gate is
//! propagated to the circuit boundaries as SPDs.
//!
//! The input SPD travels backward through the gates before the fault site and
//! the measurement SPD forward through the gates after it. Clifford gates
//! conjugate exactly; rotations are localized ([`loc_expl`]) and re-optimized
//! on the small active block.

mod locality;
mod propagate;

pub use locality::{loc_expl, normal_set, LocalizationResult};
pub use propagate::{conjugate_clifford, propagate_nonclifford, Direction, PropagationCaps, Propagated, StepMethod};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, FaultModel, Gate};
use crate::clifford::CliffordError;
use crate::dense::{DenseError, DenseOperator};
use crate::discrim::{self, DiscrimError, GatePattern};
use crate::pauli::{PauliError, SignedPauli};
use crate::spd::{self, Objective, Spd, SpdError, SpdNorms};
use crate::stabilizer::StabilizerError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtpgError {
    #[error("fault at site {0} is undetectable: the replacement equals the gate up to phase")]
    Undetectable(usize),
    #[error("rotation commutes with every projector")]
    FixedPoint,
    #[error("SPD has no terms")]
    EmptySpd,
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error(transparent)]
    Discrim(DiscrimError),
    #[error(transparent)]
    Spd(#[from] SpdError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Dense(#[from] DenseError),
}

impl From<DiscrimError> for AtpgError {
    fn from(e: DiscrimError) -> Self {
        match e {
            DiscrimError::Undetectable(site) => AtpgError::Undetectable(site),
            DiscrimError::Circuit(c) => AtpgError::Circuit(c),
            other => AtpgError::Discrim(other),
        }
    }
}

/// Converts a circuit rotation `e^{iθ/2} e^{−iθP/2}` to the exponential form
/// `e^{iφQ}` (equal up to global phase) as `(Q, φ) = (−P, θ/2)`.
pub fn to_exponential_form(pauli: &SignedPauli, theta: f64) -> (SignedPauli, f64) {
    (pauli.negated(), theta / 2.0)
}

/// Inverse of [`to_exponential_form`].
pub fn from_exponential_form(pauli: &SignedPauli, phi: f64) -> (SignedPauli, f64) {
    (pauli.negated(), 2.0 * phi)
}

/// How the optimal local input is chosen among equally good candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSelection {
    /// First canonical eigenvector per eigenspace, zero relative phases.
    Canonical,
    /// Every canonical eigenvector choice combined with relative phases on a
    /// grid of `phase_steps` points; the candidate with the smallest
    /// `ν*(𝒜_ρ)·ν(ℬ_M)` after propagation wins.
    Search { phase_steps: usize },
}

/// Settings for [`generate_test_patterns`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationOptions {
    pub caps: PropagationCaps,
    pub input: InputSelection,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions { caps: PropagationCaps::default(), input: InputSelection::Canonical }
    }
}

/// One propagation step of the localization trace.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StepRecord {
    pub gate_index: usize,
    pub direction: Direction,
    pub method: StepMethod,
    pub trivial_rank_block: Option<usize>,
    pub active_block: Option<usize>,
    pub identity_block: Option<usize>,
    pub terms: usize,
    pub norms: SpdNorms,
}

/// Generated test pattern for one fault site.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestPattern {
    pub circuit_hash: String,
    pub num_qubits: usize,
    pub site: usize,
    pub fault: FaultModel,
    /// Wires of the fault gate.
    pub wires: Vec<usize>,
    /// Overlap of the fault-free and faulty local outputs.
    pub r: f64,
    pub p_success: f64,
    pub spd_rho: Spd,
    pub spd_m: Spd,
    pub rho_norms: SpdNorms,
    pub m_norms: SpdNorms,
    /// False when any step fell back to the channel decomposition.
    pub optimal: bool,
    pub trace: Vec<StepRecord>,
    /// Local pattern the SPDs were built from; not serialized.
    #[serde(skip)]
    pub gate: Option<GatePattern>,
}

impl TestPattern {
    /// `ν*(𝒜_ρ)·ν(ℬ_M)`, the sampling overhead factor.
    pub fn overhead(&self) -> f64 {
        self.rho_norms.nu_star * self.m_norms.nu
    }

    /// Largest active block over the trace.
    pub fn max_active_block(&self) -> usize {
        self.trace.iter().filter_map(|s| s.active_block).max().unwrap_or(0)
    }

    /// Largest entrywise deviation of the reconstructed `ρ` and `M` from the
    /// dense pattern built from the same local input.
    pub fn dense_error(&self, c: &Circuit) -> Result<(f64, f64), AtpgError> {
        let gate = self.gate.as_ref().ok_or(AtpgError::EmptySpd)?;
        let (rho, m) = discrim::ideal_test_pattern_for(c, self.site, gate, None)?;
        let rho_err = self.spd_rho.reconstruct()?.max_abs_diff(&rho);
        let m_err = self.spd_m.reconstruct()?.max_abs_diff(&m);
        Ok((rho_err, m_err))
    }
}

fn record(gate_index: usize, direction: Direction, step: &Propagated) -> StepRecord {
    let (l, a, i) = match step.blocks {
        Some((l, a, i)) => (Some(l), Some(a), Some(i)),
        None => (None, None, None),
    };
    StepRecord {
        gate_index,
        direction,
        method: step.method,
        trivial_rank_block: l,
        active_block: a,
        identity_block: i,
        terms: step.spd.len(),
        norms: step.spd.norms(),
    }
}

/// Propagates `s` through one gate in the given direction. Backward steps
/// conjugate by the inverse gate.
pub fn propagate_gate(
    s: &Spd,
    gate: &Gate,
    direction: Direction,
    caps: &PropagationCaps,
) -> Result<Propagated, AtpgError> {
    let gate = match direction {
        Direction::Forward => gate.clone(),
        Direction::Backward => gate.inverse(),
    };
    match &gate {
        Gate::Rotation { pauli, theta } if !gate.is_clifford() => {
            propagate_nonclifford(s, pauli, *theta, direction, caps)
        }
        _ => {
            let mut spd = conjugate_clifford(s, &gate)?;
            if caps.sparsify_clifford && caps.sparsify_iterations > 0 {
                let opts = spd::SparsifyOptions {
                    objective: direction.objective(),
                    iterations: caps.sparsify_iterations,
                    row_cap: caps.sparsify_row_cap,
                    ..Default::default()
                };
                spd = spd::sparsify(&spd, &opts)?;
            }
            Ok(Propagated { spd, method: StepMethod::Clifford, blocks: None })
        }
    }
}

fn propagate_from_pattern(
    c: &Circuit,
    site: usize,
    fm: &FaultModel,
    gate: GatePattern,
    caps: &PropagationCaps,
) -> Result<TestPattern, AtpgError> {
    let n = c.num_qubits();
    let input = spd::optimal_spd(&DenseOperator::outer(&gate.psi_in), Objective::LexNuStarThenNu)?;
    let measure = spd::optimal_spd(&DenseOperator::outer(&gate.omega), Objective::LexNuThenNuStar)?;
    let mut rho = input.embed(n, &gate.wires);
    let mut m = measure.embed(n, &gate.wires);

    let mut trace = Vec::new();
    let mut optimal = true;
    for j in (0..site).rev() {
        let step = propagate_gate(&rho, &c.gates()[j], Direction::Backward, caps)?;
        optimal &= step.is_optimal();
        if step.method != StepMethod::Clifford {
            trace.push(record(j, Direction::Backward, &step));
        }
        rho = step.spd;
    }
    for j in site + 1..c.len() {
        let step = propagate_gate(&m, &c.gates()[j], Direction::Forward, caps)?;
        optimal &= step.is_optimal();
        if step.method != StepMethod::Clifford {
            trace.push(record(j, Direction::Forward, &step));
        }
        m = step.spd;
    }
    let tr = rho.trace();
    let rho = rho.scaled(1.0 / tr);

    Ok(TestPattern {
        circuit_hash: c.content_hash(),
        num_qubits: n,
        site,
        fault: fm.clone(),
        wires: gate.wires.clone(),
        r: gate.r,
        p_success: gate.p_success,
        rho_norms: rho.norms(),
        m_norms: m.norms(),
        spd_rho: rho,
        spd_m: m,
        optimal,
        trace,
        gate: Some(gate),
    })
}

/// Input and measurement SPDs for the fault `fm` at gate `site` (0-based).
///
/// The input SPD represents `ρ = U†_{<i}(I/2^{n−w} ⊗ |ψ̄⟩⟨ψ̄|)U_{<i}` and the
/// measurement SPD `M = U_{>i}(|ω⟩⟨ω| ⊗ I)U†_{>i}`.
pub fn generate_test_patterns(
    c: &Circuit,
    site: usize,
    fm: &FaultModel,
    opts: &GenerationOptions,
) -> Result<TestPattern, AtpgError> {
    let (wires, u, u_prime) = discrim::local_fault_unitaries(c, site, fm)?;
    let (r, mut candidates) = match opts.input {
        InputSelection::Canonical => discrim::optimal_input_candidates(&u, &u_prime, 1)?,
        InputSelection::Search { phase_steps } => discrim::optimal_input_candidates(&u, &u_prime, phase_steps)?,
    };
    if opts.input == InputSelection::Canonical {
        candidates.truncate(1);
    }
    if r >= 1.0 - 1e-9 {
        return Err(AtpgError::Undetectable(site));
    }
    let mut best: Option<TestPattern> = None;
    for psi in candidates {
        let gate = discrim::pattern_from_input(wires.clone(), &u, &u_prime, psi, site)?;
        let pattern = propagate_from_pattern(c, site, fm, gate, &opts.caps)?;
        let better = match &best {
            None => true,
            Some(b) => pattern.overhead() < b.overhead() - 1e-9,
        };
        if better {
            best = Some(pattern);
        }
    }
    Ok(best.expect("at least one candidate input"))
}

/// Patterns for every site in `sites`, generated in parallel. Each entry
/// keeps its own error (undetectable sites fail individually).
pub fn generate_all(
    c: &Circuit,
    sites: &[usize],
    fm: &FaultModel,
    opts: &GenerationOptions,
) -> Vec<(usize, Result<TestPattern, AtpgError>)> {
    sites.par_iter().map(|&site| (site, generate_test_patterns(c, site, fm, opts))).collect()
}
