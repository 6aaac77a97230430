//! One propagation step of an SPD through a gate.

use serde::{Deserialize, Serialize};

use crate::circuit::{quarter_turns, Gate};
use crate::dense::DenseOperator;
use crate::numeric::TOL;
use crate::pauli::SignedPauli;
use crate::spd::{self, LexMethod, Objective, SparsifyOptions, Spd};

use super::locality::{loc_expl, LocalizationResult};
use super::AtpgError;

/// Propagation direction; selects the lexicographic objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Measurement side, `ν` first.
    Forward,
    /// Input side, `ν*` first.
    Backward,
}

impl Direction {
    pub fn objective(self) -> Objective {
        match self {
            Direction::Forward => Objective::LexNuThenNuStar,
            Direction::Backward => Objective::LexNuStarThenNu,
        }
    }
}

/// Size limits and solver settings for propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationCaps {
    /// Largest active block solved by the exact LP.
    pub local_cap: usize,
    pub lex_method: LexMethod,
    /// Reweighting iterations after each exact step; 0 disables sparsification.
    pub sparsify_iterations: usize,
    /// Also sparsify after Clifford steps.
    pub sparsify_clifford: bool,
    /// Row cap of the sparsifier's constraint system.
    pub sparsify_row_cap: usize,
    /// Split oversized steps into groups of terms that each localize within
    /// `local_cap`; when false they go straight to the channel decomposition.
    pub grouped_fallback: bool,
}

impl Default for PropagationCaps {
    fn default() -> Self {
        PropagationCaps {
            local_cap: TOL.local_cap,
            lex_method: LexMethod::Exact,
            sparsify_iterations: SparsifyOptions::default().iterations,
            sparsify_clifford: false,
            sparsify_row_cap: SparsifyOptions::default().row_cap,
            grouped_fallback: true,
        }
    }
}

impl PropagationCaps {
    fn sparsify_options(&self, direction: Direction) -> SparsifyOptions {
        SparsifyOptions {
            objective: direction.objective(),
            iterations: self.sparsify_iterations,
            row_cap: self.sparsify_row_cap,
            ..SparsifyOptions::default()
        }
    }
}

/// How a step was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMethod {
    Clifford,
    /// The rotation commutes with every projector.
    FixedPoint,
    /// Lexicographic LP on the localized block.
    Exact,
    /// Exact LP on the non-commuting terms only, after the joint block
    /// exceeded the cap.
    ExactSplit,
    /// Exact LP per group of terms; optimal within each group only.
    Grouped,
    /// Channel decomposition; the result is not guaranteed optimal.
    Channel,
}

/// Result of one non-Clifford step.
#[derive(Debug, Clone)]
pub struct Propagated {
    pub spd: Spd,
    pub method: StepMethod,
    /// `(l, active, identity)` block sizes when localization ran.
    pub blocks: Option<(usize, usize, usize)>,
}

impl Propagated {
    pub fn is_optimal(&self) -> bool {
        !matches!(self.method, StepMethod::Channel | StepMethod::Grouped)
    }
}

/// `U 𝒜 U†` for a Clifford gate, skipping projectors the gate does not touch.
pub fn conjugate_clifford(s: &Spd, gate: &Gate) -> Result<Spd, AtpgError> {
    let wires = gate.wires();
    let touched = |p: &crate::StabilizerProjector| {
        p.generators().iter().any(|g| wires.iter().any(|&q| g.x_bit(q) || g.z_bit(q)))
    };
    if s.terms().iter().all(|t| !touched(&t.proj)) {
        return Ok(s.clone());
    }
    Ok(s.conjugate_gate(gate)?)
}

fn solve_localized(
    loc: &LocalizationResult,
    direction: Direction,
    caps: &PropagationCaps,
) -> Result<Spd, AtpgError> {
    let (pauli, theta) = &loc.local_rotation;
    let mut target: DenseOperator = loc.local_spd.reconstruct()?;
    target.conjugate_by_gate(&Gate::Rotation { pauli: pauli.clone(), theta: *theta });
    let b = spd::pauli_coefficients(&target);
    let mut local = spd::optimal_spd_from_coefficients(loc.active_block, &b, direction.objective(), caps.lex_method)?;
    if caps.sparsify_iterations > 0 {
        local = spd::sparsify(&local, &caps.sparsify_options(direction))?;
    }
    let inverse = loc.u_c.inverse();
    let n = loc.u_c.num_qubits();
    Ok(local.map_projectors(n, |p| {
        loc.lift_local(p).map_generators(|g| inverse.conjugate(g).expect("same register"))
    }))
}

/// `R 𝒜 R†` for the rotation `R = e^{iθ/2} e^{−iθP/2}`.
///
/// Clifford angles conjugate directly. Otherwise the rotation is localized
/// and the local block re-optimized with the direction's lexicographic
/// objective when it fits within `caps.local_cap`; larger blocks fall back to
/// the channel decomposition.
pub fn propagate_nonclifford(
    s: &Spd,
    pauli: &SignedPauli,
    theta: f64,
    direction: Direction,
    caps: &PropagationCaps,
) -> Result<Propagated, AtpgError> {
    let gate = Gate::Rotation { pauli: pauli.clone(), theta };
    if quarter_turns(theta).is_some() {
        return Ok(Propagated { spd: conjugate_clifford(s, &gate)?, method: StepMethod::Clifford, blocks: None });
    }
    let loc = match loc_expl(pauli, theta, s) {
        Ok(loc) => loc,
        Err(AtpgError::FixedPoint) | Err(AtpgError::EmptySpd) => {
            return Ok(Propagated { spd: s.clone(), method: StepMethod::FixedPoint, blocks: None })
        }
        Err(e) => return Err(e),
    };
    let blocks = Some((loc.trivial_rank_block, loc.active_block, loc.identity_block));
    if loc.active_block <= caps.local_cap {
        let spd = solve_localized(&loc, direction, caps)?;
        return Ok(Propagated { spd, method: StepMethod::Exact, blocks });
    }

    // Terms commuting with the rotation are invariant; localize the rest alone.
    let n = s.num_qubits();
    let (fixed, moving): (Vec<_>, Vec<_>) = s
        .terms()
        .iter()
        .map(|t| (t.coeff, t.proj.clone()))
        .partition(|(_, p)| p.generators().iter().all(|g| g.commutes(pauli)));
    if !fixed.is_empty() {
        let moving_spd = Spd::from_terms(n, moving.iter().cloned());
        let loc = loc_expl(pauli, theta, &moving_spd)?;
        if loc.active_block <= caps.local_cap {
            let blocks = Some((loc.trivial_rank_block, loc.active_block, loc.identity_block));
            let moved = solve_localized(&loc, direction, caps)?;
            let spd = moved.merged(&Spd::from_terms(n, fixed))?;
            return Ok(Propagated { spd, method: StepMethod::ExactSplit, blocks });
        }
    }

    if caps.grouped_fallback {
        let mut out = Spd::from_terms(n, fixed);
        for group in localizable_groups(n, moving, pauli, theta, caps.local_cap)? {
            let loc = loc_expl(pauli, theta, &group)?;
            out = out.merged(&solve_localized(&loc, direction, caps)?)?;
        }
        if caps.sparsify_iterations > 0 {
            out = spd::sparsify(&out, &caps.sparsify_options(direction))?;
        }
        return Ok(Propagated { spd: out, method: StepMethod::Grouped, blocks });
    }

    let mut spd = spd::apply_rotation_via_channels(s, pauli, theta);
    if caps.sparsify_iterations > 0 {
        spd = spd::sparsify(&spd, &caps.sparsify_options(direction))?;
    }
    Ok(Propagated { spd, method: StepMethod::Channel, blocks })
}

/// Greedily packs terms into groups whose joint localization stays within
/// `cap`. A single non-commuting projector always localizes to one qubit.
fn localizable_groups(
    n: usize,
    terms: Vec<(f64, crate::StabilizerProjector)>,
    pauli: &SignedPauli,
    theta: f64,
    cap: usize,
) -> Result<Vec<Spd>, AtpgError> {
    let mut groups: Vec<Vec<(f64, crate::StabilizerProjector)>> = Vec::new();
    for term in terms {
        let mut placed = false;
        for group in groups.iter_mut() {
            group.push(term.clone());
            if loc_expl(pauli, theta, &Spd::from_terms(n, group.iter().cloned()))?.active_block <= cap {
                placed = true;
                break;
            }
            group.pop();
        }
        if !placed {
            groups.push(vec![term]);
        }
    }
    Ok(groups.into_iter().map(|g| Spd::from_terms(n, g)).collect())
}
