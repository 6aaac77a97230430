//! Optimal discrimination of a gate from its faulty replacement.
//!
//! The optimal local input minimizes `|⟨ψ̄|U†U′|ψ̄⟩|`, which is the distance
//! from the origin to the convex hull of the eigenvalues of `U†U′`. The
//! Helstrom basis then separates the two output states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, FaultModel, Gate};
use crate::dense::{self, DenseError, DenseOperator, Eigenpair, C64};
use crate::numeric::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscrimError {
    #[error("states are parallel (overlap {0}); discrimination is undefined")]
    DegeneratePair(f64),
    #[error("fault at site {0} is undetectable: the replacement equals the gate up to phase")]
    Undetectable(usize),
    #[error("gate acts on {0} qubits; local discrimination supports at most 4")]
    TooManyWires(usize),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Overlaps at or above this are treated as parallel states.
const PARALLEL_TOL: f64 = 1e-12;

/// Local test pattern for one gate and its faulty version.
#[derive(Debug, Clone)]
pub struct GatePattern {
    /// Wires of the fault gate; local qubit `k` is `wires[k]`.
    pub wires: Vec<usize>,
    pub psi_in: Vec<C64>,
    pub omega: Vec<C64>,
    pub omega_prime: Vec<C64>,
    pub r: f64,
    pub p_success: f64,
}

/// Helstrom success probability `½(1 + √(1 − r²))`.
pub fn success_probability(r: f64) -> f64 {
    0.5 * (1.0 + (1.0 - r * r).max(0.0).sqrt())
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Distinct eigenvalues with the indices of their eigenpairs.
fn clusters(pairs: &[Eigenpair]) -> Vec<(C64, Vec<usize>)> {
    let mut out: Vec<(C64, Vec<usize>)> = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        match out.iter_mut().find(|(v, _)| (*v - p.value).norm() < TOL.eigen_cluster) {
            Some((_, idx)) => idx.push(i),
            None => out.push((p.value, vec![i])),
        }
    }
    out
}

/// Minimizing weights over the eigenvalue points: `(r, [(cluster, weight)])`.
fn hull_weights(points: &[C64]) -> (f64, Vec<(usize, f64)>) {
    let m = points.len();
    if m == 1 {
        return (1.0, vec![(0, 1.0)]);
    }
    let mut order: Vec<usize> = (0..m).collect();
    let angle = |i: usize| points[i].arg().rem_euclid(2.0 * PI);
    order.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).unwrap());
    let mut best_gap = (0.0, 0, 0);
    for k in 0..m {
        let (a, b) = (order[k], order[(k + 1) % m]);
        let mut gap = angle(b) - angle(a);
        if k + 1 == m {
            gap += 2.0 * PI;
        }
        if gap > best_gap.0 {
            best_gap = (gap, a, b);
        }
    }
    let (gap, a, b) = best_gap;
    if gap > PI + 1e-12 {
        // All points sit in an arc of width 2π − gap; the nearest hull point
        // is the midpoint of the chord joining its ends.
        let width = 2.0 * PI - gap;
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        return ((width / 2.0).cos().max(0.0), vec![(i, 0.5), (j, 0.5)]);
    }
    // The origin lies in the hull: use an antipodal pair or a triangle.
    for i in 0..m {
        for j in i + 1..m {
            if (points[i] + points[j]).norm() < 1e-9 {
                return (0.0, vec![(i, 0.5), (j, 0.5)]);
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                if let Some(w) = barycentric_origin(points[i], points[j], points[k]) {
                    return (0.0, vec![(i, w[0]), (j, w[1]), (k, w[2])]);
                }
            }
        }
    }
    unreachable!("origin inside the hull of points on the circle lies in some triangle")
}

/// Barycentric weights of the origin in triangle `abc`, when inside.
fn barycentric_origin(a: C64, b: C64, c: C64) -> Option<[f64; 3]> {
    let cross = |u: C64, v: C64| u.re * v.im - u.im * v.re;
    let area = cross(b - a, c - a);
    if area.abs() < 1e-14 {
        return None;
    }
    let wa = cross(b, c) / area;
    let wb = cross(c, a) / area;
    let wc = cross(a, b) / area;
    let tol = -1e-12;
    (wa >= tol && wb >= tol && wc >= tol).then(|| [wa.max(0.0), wb.max(0.0), wc.max(0.0)])
}

fn check_unitary(u: &DenseOperator) -> Result<(), DiscrimError> {
    let dev = u.adjoint().matmul(u).max_abs_diff(&DenseOperator::identity(u.num_qubits()));
    if dev > TOL.unitarity {
        return Err(DenseError::NotUnitary(dev).into());
    }
    Ok(())
}

/// Optimal input `|ψ̄⟩` minimizing `|⟨ψ̄|U†U′|ψ̄⟩|`, with that minimum `r`.
///
/// Weights go to at most three eigenvalues of `U†U′`; within a degenerate
/// eigenspace the first canonical eigenvector is used.
pub fn optimal_input(u: &DenseOperator, u_prime: &DenseOperator) -> Result<(Vec<C64>, f64), DiscrimError> {
    let (r, mut candidates) = optimal_input_candidates(u, u_prime, 1)?;
    Ok((candidates.swap_remove(0), r))
}

/// Several optimal inputs, all achieving the same `r`: every choice of
/// canonical eigenvector per supporting eigenspace combined with relative
/// phases on a grid of `phase_steps` points. The first candidate is the one
/// returned by [`optimal_input`].
pub fn optimal_input_candidates(
    u: &DenseOperator,
    u_prime: &DenseOperator,
    phase_steps: usize,
) -> Result<(f64, Vec<Vec<C64>>), DiscrimError> {
    check_unitary(u)?;
    check_unitary(u_prime)?;
    if u.dim() != u_prime.dim() {
        return Err(DenseError::DimensionMismatch(u.dim(), u_prime.dim()).into());
    }
    let w = u.adjoint().matmul(u_prime);
    let pairs = dense::eig_unitary(&w)?;
    let groups = clusters(&pairs);
    let points: Vec<C64> = groups.iter().map(|(v, _)| *v).collect();
    let (r, weights) = hull_weights(&points);
    let steps = phase_steps.max(1);
    let d = u.dim();

    // Choice index per supporting cluster, then phase index per non-first cluster.
    let mut choice_sets: Vec<Vec<usize>> = vec![Vec::new()];
    for &(g, _) in &weights {
        let members = &groups[g].1;
        choice_sets = choice_sets
            .into_iter()
            .flat_map(|prefix| {
                members.iter().map(move |&m| {
                    let mut p = prefix.clone();
                    p.push(m);
                    p
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for choice in &choice_sets {
        let mut phase_sets: Vec<Vec<usize>> = vec![vec![0]];
        for _ in 1..weights.len() {
            phase_sets = phase_sets
                .into_iter()
                .flat_map(|p| {
                    (0..steps).map(move |s| {
                        let mut q = p.clone();
                        q.push(s);
                        q
                    })
                })
                .collect();
        }
        for phases in &phase_sets {
            let mut psi = vec![C64::new(0.0, 0.0); d];
            for ((&(_, wt), &m), &s) in weights.iter().zip(choice).zip(phases) {
                let ph = C64::from_polar(wt.sqrt(), 2.0 * PI * s as f64 / steps as f64);
                for (x, v) in psi.iter_mut().zip(&pairs[m].vector) {
                    *x += ph * v;
                }
            }
            let nrm = norm(&psi);
            for x in psi.iter_mut() {
                *x /= nrm;
            }
            out.push(psi);
        }
    }
    Ok((r, out))
}

/// Helstrom basis `(ω, ω′)` for distinguishing `ψ` from `ψ′`.
pub fn helstrom_basis(psi: &[C64], psi_prime: &[C64]) -> Result<(Vec<C64>, Vec<C64>), DiscrimError> {
    let ov = inner(psi, psi_prime);
    let r = ov.norm();
    if r >= 1.0 - PARALLEL_TOL {
        return Err(DiscrimError::DegeneratePair(r));
    }
    let rot = if r > 0.0 { ov.conj() / r } else { C64::new(1.0, 0.0) };
    let a: Vec<C64> = psi.iter().zip(psi_prime).map(|(x, y)| x + rot * y).collect();
    let b: Vec<C64> = psi.iter().zip(psi_prime).map(|(x, y)| x - rot * y).collect();
    let (na, nb) = (norm(&a), norm(&b));
    let omega = a.iter().zip(&b).map(|(x, y)| (x / na + y / nb) * FRAC_1_SQRT_2).collect();
    let omega_prime = a.iter().zip(&b).map(|(x, y)| (x / na - y / nb) * FRAC_1_SQRT_2).collect();
    Ok((omega, omega_prime))
}

/// Local fault-free and faulty unitaries of gate `site` on its wires.
pub fn local_fault_unitaries(
    c: &Circuit,
    site: usize,
    fm: &FaultModel,
) -> Result<(Vec<usize>, DenseOperator, DenseOperator), DiscrimError> {
    let gate: &Gate = c.gates().get(site).ok_or(CircuitError::SiteOutOfRange { site, len: c.len() })?;
    let mut wires = gate.wires();
    wires.sort_unstable();
    if wires.len() > 4 {
        return Err(DiscrimError::TooManyWires(wires.len()));
    }
    let replacement = fm.replacement(gate)?;
    let u = dense::local_unitary(std::slice::from_ref(gate), &wires);
    let u_prime = dense::local_unitary(&replacement, &wires);
    Ok((wires, u, u_prime))
}

/// Gate pattern from a chosen optimal input.
pub fn pattern_from_input(
    wires: Vec<usize>,
    u: &DenseOperator,
    u_prime: &DenseOperator,
    psi_in: Vec<C64>,
    site: usize,
) -> Result<GatePattern, DiscrimError> {
    let psi = u.apply_to_vector(&psi_in);
    let psi_prime = u_prime.apply_to_vector(&psi_in);
    let r = inner(&psi, &psi_prime).norm();
    let (omega, omega_prime) = helstrom_basis(&psi, &psi_prime).map_err(|e| match e {
        DiscrimError::DegeneratePair(_) => DiscrimError::Undetectable(site),
        other => other,
    })?;
    Ok(GatePattern { wires, psi_in, omega, omega_prime, r, p_success: success_probability(r) })
}

/// Optimal local pattern for the fault at `site`.
pub fn gate_pattern(c: &Circuit, site: usize, fm: &FaultModel) -> Result<GatePattern, DiscrimError> {
    let (wires, u, u_prime) = local_fault_unitaries(c, site, fm)?;
    let (psi_in, _) = optimal_input(&u, &u_prime)?;
    pattern_from_input(wires, &u, &u_prime, psi_in, site)
}

/// Dense test pattern `(ρ, M)` with the identity on the untouched wires:
/// `ρ = U†_{<i}(I/2^{n−w} ⊗ |ψ̄⟩⟨ψ̄|)U_{<i}` and `M = U_{>i}(I ⊗ |ω⟩⟨ω|)U†_{>i}`.
pub fn ideal_test_pattern(
    c: &Circuit,
    site: usize,
    fm: &FaultModel,
) -> Result<(DenseOperator, DenseOperator), DiscrimError> {
    let pattern = gate_pattern(c, site, fm)?;
    ideal_test_pattern_for(c, site, &pattern, None)
}

/// As [`ideal_test_pattern`] for a given local pattern, optionally with a
/// state `rest` (unit trace) on the other wires instead of the maximally mixed one.
pub fn ideal_test_pattern_for(
    c: &Circuit,
    site: usize,
    pattern: &GatePattern,
    rest: Option<&DenseOperator>,
) -> Result<(DenseOperator, DenseOperator), DiscrimError> {
    let n = c.num_qubits();
    dense::check_cap(n, TOL.dense_cap)?;
    let others = n - pattern.wires.len();
    let mixed = DenseOperator::identity(others).scale_real(1.0 / (1u64 << others) as f64);
    let rest = rest.unwrap_or(&mixed);
    let mut rho = DenseOperator::outer(&pattern.psi_in).embed_with_rest(n, &pattern.wires, rest);
    for g in c.gates()[..site].iter().rev() {
        rho.conjugate_by_gate(&g.inverse());
    }
    let mut m = DenseOperator::outer(&pattern.omega).embed(n, &pattern.wires);
    for g in &c.gates()[site + 1..] {
        m.conjugate_by_gate(g);
    }
    Ok((rho, m))
}
