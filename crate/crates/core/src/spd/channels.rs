//! Rotation channels as signed mixtures of three Clifford channels.

use std::f64::consts::FRAC_PI_2;

use super::Spd;
use crate::circuit::{wrap_angle, Gate};
use crate::pauli::SignedPauli;

/// Weights `(c_I, c_Z, c_S)` with
/// `Z(θ)·Z(θ)† = c_I·id + c_Z·(Z·Z) + c_S·(S·S†)` for `0 ≤ θ ≤ π`.
pub fn rotation_channel_terms(theta: f64) -> (f64, f64, f64) {
    let (s, c) = theta.sin_cos();
    ((1.0 + c - s) / 2.0, (1.0 - c - s) / 2.0, s)
}

/// `e^{−iθP/2} 𝒜 e^{iθP/2}` via the three-channel decomposition, with the
/// `S` channel replaced by its inverse for negative angles.
pub fn apply_rotation_via_channels(s: &Spd, pauli: &SignedPauli, theta: f64) -> Spd {
    let theta = wrap_angle(theta);
    if theta == 0.0 {
        return s.clone();
    }
    let (c_i, c_z, c_s) = rotation_channel_terms(theta.abs());
    let quarter = Gate::Rotation { pauli: pauli.clone(), theta: FRAC_PI_2.copysign(theta) };
    let n = s.num_qubits();
    let mut terms = Vec::with_capacity(3 * s.len());
    for t in s.terms() {
        terms.push((c_i * t.coeff, t.proj.clone()));
        let flipped =
            t.proj.map_generators(|g| if g.commutes(pauli) { g.clone() } else { g.negated() });
        terms.push((c_z * t.coeff, flipped));
        let turned = t.proj.map_generators(|g| quarter.conjugate(g).expect("quarter turn is Clifford"));
        terms.push((c_s * t.coeff, turned));
    }
    Spd::from_terms(n, terms)
}
