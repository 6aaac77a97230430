use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::pauli::{PauliKind, SignedPauli};

/// One gate of a circuit. Wire indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
    /// `(I + P)/2 + e^{iθ} (I - P)/2`, i.e. `e^{iθ/2} e^{-iθP/2}`.
    /// `Rz(θ) = diag(1, e^{iθ})` is the single-qubit `P = Z` case.
    Rotation { pauli: SignedPauli, theta: f64 },
}

/// Angle reduced into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Tolerance for deciding that a rotation angle is a multiple of `π/2`.
const CLIFFORD_ANGLE_TOL: f64 = 1e-12;

/// Number of quarter turns when `theta` is a multiple of `π/2`.
pub fn quarter_turns(theta: f64) -> Option<i32> {
    let q = theta / (PI / 2.0);
    let r = q.round();
    if (q - r).abs() < CLIFFORD_ANGLE_TOL {
        Some((r as i64).rem_euclid(4) as i32)
    } else {
        None
    }
}

impl Gate {
    /// `Rz(θ) = diag(1, e^{iθ})` on wire `q` of an `n`-qubit register.
    pub fn rz(n: usize, q: usize, theta: f64) -> Gate {
        Gate::Rotation { pauli: SignedPauli::z_on(n, q), theta }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    /// Wires the gate acts on, in gate order.
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Rotation { pauli, .. } => pauli.support(),
        }
    }

    /// True for every gate that maps Paulis to Paulis under conjugation.
    pub fn is_clifford(&self) -> bool {
        match self {
            Gate::Rotation { theta, .. } => quarter_turns(*theta).is_some(),
            _ => true,
        }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::Rotation { pauli, theta } => Gate::Rotation { pauli: pauli.clone(), theta: wrap_angle(-theta) },
            g => g.clone(),
        }
    }

    /// Relabels wires through `map` (old wire to new wire) into an `n`-qubit register.
    pub fn remap(&self, n: usize, map: &dyn Fn(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(map(*q)),
            Gate::S(q) => Gate::S(map(*q)),
            Gate::Sdg(q) => Gate::Sdg(map(*q)),
            Gate::X(q) => Gate::X(map(*q)),
            Gate::Y(q) => Gate::Y(map(*q)),
            Gate::Z(q) => Gate::Z(map(*q)),
            Gate::Cnot { control, target } => Gate::Cnot { control: map(*control), target: map(*target) },
            Gate::Swap(a, b) => Gate::Swap(map(*a), map(*b)),
            Gate::Rotation { pauli, theta } => {
                let mut p = SignedPauli::identity(n);
                for q in pauli.support() {
                    p.set(map(q), pauli.kind(q));
                }
                p.set_negative(pauli.is_negative());
                Gate::Rotation { pauli: p, theta: *theta }
            }
        }
    }

    /// Heisenberg action `U P U†` for Clifford gates; `None` for non-Clifford rotations.
    pub fn conjugate(&self, p: &SignedPauli) -> Option<SignedPauli> {
        let mut out = p.clone();
        if self.conjugate_in_place(&mut out) {
            Some(out)
        } else {
            None
        }
    }

    /// In-place `P <- U P U†`; returns false (leaving `P` untouched) for non-Clifford rotations.
    pub fn conjugate_in_place(&self, p: &mut SignedPauli) -> bool {
        let flip = |p: &mut SignedPauli| p.set_negative(!p.is_negative());
        match self {
            Gate::H(q) => {
                let (x, z) = (p.x_bit(*q), p.z_bit(*q));
                p.set_x_bit(*q, z);
                p.set_z_bit(*q, x);
                if x && z {
                    flip(p);
                }
            }
            Gate::S(q) => {
                let (x, z) = (p.x_bit(*q), p.z_bit(*q));
                p.set_z_bit(*q, z ^ x);
                if x && z {
                    flip(p);
                }
            }
            Gate::Sdg(q) => {
                let (x, z) = (p.x_bit(*q), p.z_bit(*q));
                p.set_z_bit(*q, z ^ x);
                if x && !z {
                    flip(p);
                }
            }
            Gate::X(q) => {
                if p.z_bit(*q) {
                    flip(p);
                }
            }
            Gate::Z(q) => {
                if p.x_bit(*q) {
                    flip(p);
                }
            }
            Gate::Y(q) => {
                if p.x_bit(*q) ^ p.z_bit(*q) {
                    flip(p);
                }
            }
            Gate::Cnot { control: c, target: t } => {
                let (xc, zc, xt, zt) = (p.x_bit(*c), p.z_bit(*c), p.x_bit(*t), p.z_bit(*t));
                p.set_x_bit(*t, xt ^ xc);
                p.set_z_bit(*c, zc ^ zt);
                if xc && zt && (xt == zc) {
                    flip(p);
                }
            }
            Gate::Swap(a, b) => {
                let (ka, kb) = (p.kind(*a), p.kind(*b));
                p.set(*a, kb);
                p.set(*b, ka);
            }
            Gate::Rotation { pauli, theta } => {
                let Some(turns) = quarter_turns(*theta) else { return false };
                if p.commutes(pauli) {
                    return true;
                }
                // e^{-iθP/2} Q e^{iθP/2} = e^{-iθP} Q for anticommuting Q.
                match turns {
                    0 => {}
                    2 => flip(p),
                    1 => *p = times_i(pauli, p, -1),
                    _ => *p = times_i(pauli, p, 1),
                }
            }
        }
        true
    }

    /// Heisenberg action of the inverse gate, `U† P U`.
    pub fn conjugate_inverse(&self, p: &SignedPauli) -> Option<SignedPauli> {
        self.inverse().conjugate(p)
    }

    /// Per-wire Pauli kind of a single-qubit gate, when it is a Pauli.
    pub fn as_pauli_kind(&self) -> Option<PauliKind> {
        match self {
            Gate::X(_) => Some(PauliKind::X),
            Gate::Y(_) => Some(PauliKind::Y),
            Gate::Z(_) => Some(PauliKind::Z),
            _ => None,
        }
    }
}

/// `(±i) P Q` for anticommuting `P`, `Q`; the result is Hermitian.
fn times_i(p: &SignedPauli, q: &SignedPauli, sign: i64) -> SignedPauli {
    let (phase, mut r) = p.mul_phased(q).expect("same register");
    let total = (phase.exponent() as i64 + sign).rem_euclid(4);
    debug_assert!(total % 2 == 0);
    r.set_negative(total == 2);
    r
}
