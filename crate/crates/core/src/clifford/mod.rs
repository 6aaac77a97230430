//! Clifford tableaus, completion of partial Pauli maps, circuit synthesis and a
//! stabilizer-state simulator.

mod chp;
mod synth;

pub use chp::{clifford_simulate, StabilizerState};
pub use synth::{projector_prep_circuit, tableau_to_circuit};

use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::gf2::{self, BitRow, SpanSolver};
use crate::pauli::{product_exponent, words_for, PauliError, SignedPauli};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliffordError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("gate {0:?} is not Clifford")]
    NonClifford(Gate),
    #[error("the {0} Paulis are not independent")]
    Dependent(&'static str),
    #[error("commutation pattern differs between sources and images at pair ({0}, {1})")]
    CommutationMismatch(usize, usize),
    #[error("images do not form a symplectic basis")]
    NotSymplectic,
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Accumulates a product of Paulis as `i^exp * R`.
#[derive(Clone)]
pub(crate) struct PhasedProduct {
    n: usize,
    exp: i64,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PhasedProduct {
    pub(crate) fn identity(n: usize) -> Self {
        let w = words_for(n);
        PhasedProduct { n, exp: 0, x: vec![0; w], z: vec![0; w] }
    }

    pub(crate) fn mul(&mut self, p: &SignedPauli) {
        self.exp += product_exponent(&self.x, &self.z, p.x_words(), p.z_words());
        if p.is_negative() {
            self.exp += 2;
        }
        gf2::xor_into(&mut self.x, p.x_words());
        gf2::xor_into(&mut self.z, p.z_words());
    }

    /// Multiplies the accumulated operator by `i^k`.
    pub(crate) fn rotate_phase(&mut self, k: i64) {
        self.exp += k;
    }

    pub(crate) fn exponent(&self) -> i64 {
        self.exp.rem_euclid(4)
    }

    pub(crate) fn into_signed(self) -> Result<SignedPauli, PauliError> {
        match self.exp.rem_euclid(4) {
            0 => Ok(SignedPauli::from_words(self.n, self.x, self.z, false)),
            2 => Ok(SignedPauli::from_words(self.n, self.x, self.z, true)),
            _ => Err(PauliError::ImaginaryPhase),
        }
    }
}

/// Signed images of `X_j` and `Z_j` under `P -> U P U†`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<SignedPauli>,
    z_images: Vec<SignedPauli>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            n,
            x_images: (0..n).map(|q| SignedPauli::x_on(n, q)).collect(),
            z_images: (0..n).map(|q| SignedPauli::z_on(n, q)).collect(),
        }
    }

    /// Builds a tableau from explicit images, checking the symplectic condition.
    pub fn from_images(x_images: Vec<SignedPauli>, z_images: Vec<SignedPauli>) -> Result<Self, CliffordError> {
        let n = x_images.len();
        for p in x_images.iter().chain(&z_images) {
            if p.num_qubits() != n {
                return Err(CliffordError::QubitMismatch(n, p.num_qubits()));
            }
        }
        if z_images.len() != n {
            return Err(CliffordError::QubitMismatch(n, z_images.len()));
        }
        let t = CliffordTableau { n, x_images, z_images };
        if t.is_symplectic() {
            Ok(t)
        } else {
            Err(CliffordError::NotSymplectic)
        }
    }

    pub fn from_circuit(c: &Circuit) -> Result<Self, CliffordError> {
        Self::from_gates(c.num_qubits(), c.gates())
    }

    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self, CliffordError> {
        let mut t = Self::identity(n);
        for g in gates {
            t.apply_gate(g)?;
        }
        Ok(t)
    }

    /// Appends `gate` after the current map.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), CliffordError> {
        if !gate.is_clifford() {
            return Err(CliffordError::NonClifford(gate.clone()));
        }
        for p in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            gate.conjugate_in_place(p);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, q: usize) -> &SignedPauli {
        &self.x_images[q]
    }

    pub fn z_image(&self, q: usize) -> &SignedPauli {
        &self.z_images[q]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &SignedPauli) -> Result<SignedPauli, CliffordError> {
        if p.num_qubits() != self.n {
            return Err(CliffordError::QubitMismatch(self.n, p.num_qubits()));
        }
        let mut acc = PhasedProduct::identity(self.n);
        if p.is_negative() {
            acc.rotate_phase(2);
        }
        for q in 0..self.n {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            // Y = i X Z.
            if x && z {
                acc.rotate_phase(1);
            }
            if x {
                acc.mul(&self.x_images[q]);
            }
            if z {
                acc.mul(&self.z_images[q]);
            }
        }
        Ok(acc.into_signed()?)
    }

    /// The map `self` followed by `next`.
    pub fn then(&self, next: &CliffordTableau) -> Result<CliffordTableau, CliffordError> {
        if next.n != self.n {
            return Err(CliffordError::QubitMismatch(self.n, next.n));
        }
        let map = |v: &[SignedPauli]| v.iter().map(|p| next.conjugate(p)).collect::<Result<Vec<_>, _>>();
        Ok(CliffordTableau { n: self.n, x_images: map(&self.x_images)?, z_images: map(&self.z_images)? })
    }

    /// The inverse map `P -> U† P U`.
    pub fn inverse(&self) -> CliffordTableau {
        let rows: Vec<BitRow> = self.x_images.iter().chain(&self.z_images).map(gf2::pauli_row).collect();
        let solver = SpanSolver::new(&rows);
        let n = self.n;
        let preimage = |target: &SignedPauli| -> SignedPauli {
            let c = solver.express(&gf2::pauli_row(target)).expect("tableau images span the Pauli group");
            let mut q = SignedPauli::from_bits(&c[..n], &c[n..], false);
            let image = self.conjugate(&q).expect("Hermitian preimage");
            if image.is_negative() != target.is_negative() {
                q.set_negative(true);
            }
            q
        };
        CliffordTableau {
            n,
            x_images: (0..n).map(|q| preimage(&SignedPauli::x_on(n, q))).collect(),
            z_images: (0..n).map(|q| preimage(&SignedPauli::z_on(n, q))).collect(),
        }
    }

    /// True when the images satisfy the canonical commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let xx = self.x_images[i].commutes(&self.x_images[j]);
                let zz = self.z_images[i].commutes(&self.z_images[j]);
                let xz = self.x_images[i].commutes(&self.z_images[j]);
                if !xx || !zz || xz != (i != j) {
                    return false;
                }
            }
        }
        true
    }

    /// A Clifford map with `U P_i U† = Q_i` for every pair.
    ///
    /// The partial map is completed to a full symplectic basis on both sides;
    /// pairs with equal sources and images complete identically.
    pub fn from_pauli_map(n: usize, pairs: &[(SignedPauli, SignedPauli)]) -> Result<Self, CliffordError> {
        for (p, q) in pairs {
            if p.num_qubits() != n {
                return Err(CliffordError::QubitMismatch(n, p.num_qubits()));
            }
            if q.num_qubits() != n {
                return Err(CliffordError::QubitMismatch(n, q.num_qubits()));
            }
        }
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if pairs[i].0.commutes(&pairs[j].0) != pairs[i].1.commutes(&pairs[j].1) {
                    return Err(CliffordError::CommutationMismatch(i, j));
                }
            }
        }
        let sources: Vec<_> = pairs.iter().map(|(p, _)| p.clone()).collect();
        let images: Vec<_> = pairs.iter().map(|(_, q)| q.clone()).collect();
        if !crate::pauli::independent(&sources) {
            return Err(CliffordError::Dependent("source"));
        }
        if !crate::pauli::independent(&images) {
            return Err(CliffordError::Dependent("image"));
        }

        // Mirrored symplectic Gram-Schmidt: every product taken on the source
        // side is repeated on the image side with the same scalar.
        let mut remaining: Vec<(SignedPauli, SignedPauli)> = pairs.to_vec();
        let mut src_pairs: Vec<(SignedPauli, SignedPauli)> = Vec::new();
        let mut img_pairs: Vec<(SignedPauli, SignedPauli)> = Vec::new();
        let mut centers: Vec<(SignedPauli, SignedPauli)> = Vec::new();
        while !remaining.is_empty() {
            let a = remaining.remove(0);
            let Some(pos) = remaining.iter().position(|c| !c.0.commutes(&a.0)) else {
                centers.push(a);
                continue;
            };
            let b = remaining.remove(pos);
            for c in remaining.iter_mut() {
                let (wa, wb) = (!c.0.commutes(&a.0), !c.0.commutes(&b.0));
                if wb {
                    *c = mirrored_product(c, &a)?;
                }
                if wa {
                    *c = mirrored_product(c, &b)?;
                }
            }
            src_pairs.push((a.0, b.0));
            img_pairs.push((a.1, b.1));
        }
        let src_centers: Vec<_> = centers.iter().map(|c| c.0.clone()).collect();
        let img_centers: Vec<_> = centers.iter().map(|c| c.1.clone()).collect();
        let src_basis = complete_basis(n, src_pairs, &src_centers)?;
        let img_basis = complete_basis(n, img_pairs, &img_centers)?;

        let src_rows: Vec<BitRow> = src_basis.iter().map(gf2::pauli_row).collect();
        let solver = SpanSolver::new(&src_rows);
        if solver.rank() != 2 * n {
            return Err(CliffordError::NotSymplectic);
        }
        let image_of = |target: &SignedPauli| -> Result<SignedPauli, CliffordError> {
            let c = solver.express(&gf2::pauli_row(target)).ok_or(CliffordError::NotSymplectic)?;
            let mut src = PhasedProduct::identity(n);
            let mut img = PhasedProduct::identity(n);
            for (k, &bit) in c.iter().enumerate() {
                if bit {
                    src.mul(&src_basis[k]);
                    img.mul(&img_basis[k]);
                }
            }
            // target = i^{-e} Π B_k, so the image is i^{-e} Π B'_k.
            img.rotate_phase(-src.exponent());
            Ok(img.into_signed()?)
        };
        let x_images = (0..n).map(|q| image_of(&SignedPauli::x_on(n, q))).collect::<Result<Vec<_>, _>>()?;
        let z_images = (0..n).map(|q| image_of(&SignedPauli::z_on(n, q))).collect::<Result<Vec<_>, _>>()?;
        let t = Self::from_images(x_images, z_images)?;
        for (p, q) in pairs {
            if t.conjugate(p)? != *q {
                return Err(CliffordError::NotSymplectic);
            }
        }
        Ok(t)
    }
}

/// `(c_P a_P, c_Q a_Q)` rescaled so the source side carries a `+` sign.
fn mirrored_product(
    c: &(SignedPauli, SignedPauli),
    a: &(SignedPauli, SignedPauli),
) -> Result<(SignedPauli, SignedPauli), CliffordError> {
    let (ps, rs) = c.0.mul_phased(&a.0)?;
    let (pi, mut ri) = c.1.mul_phased(&a.1)?;
    let diff = (pi.exponent() as i64 - ps.exponent() as i64).rem_euclid(4);
    match diff {
        0 => {}
        2 => ri.set_negative(true),
        _ => return Err(CliffordError::Pauli(PauliError::ImaginaryPhase)),
    }
    if rs.is_identity() {
        return Err(CliffordError::Dependent("source"));
    }
    if ri.is_identity() {
        return Err(CliffordError::Dependent("image"));
    }
    Ok((rs, ri))
}

/// Row `r` with the X and Z halves swapped, so `dot(e, swap(v)) = ω(e, v)`.
fn swapped_row(p: &SignedPauli) -> BitRow {
    let mut row = p.z_words().to_vec();
    row.extend_from_slice(p.x_words());
    row
}

/// A Pauli anticommuting with exactly the constraint rows flagged in `rhs`.
fn solve_partner(n: usize, constraints: &[&SignedPauli], rhs: &[bool]) -> Result<SignedPauli, CliffordError> {
    let rows: Vec<BitRow> = constraints.iter().map(|p| swapped_row(p)).collect();
    let sol = gf2::solve_system(&rows, rhs, 2 * words_for(n)).ok_or(CliffordError::NotSymplectic)?;
    Ok(gf2::row_to_pauli(n, &sol))
}

/// Extends hyperbolic pairs and isotropic centers to a full symplectic basis,
/// returned as `[a_1, b_1, ..., a_n, b_n]` with centers as the `a`s.
fn complete_basis(
    n: usize,
    mut pairs: Vec<(SignedPauli, SignedPauli)>,
    centers: &[SignedPauli],
) -> Result<Vec<SignedPauli>, CliffordError> {
    let mut partners: Vec<SignedPauli> = Vec::new();
    for k in 0..centers.len() {
        let mut cons: Vec<&SignedPauli> = Vec::new();
        let mut rhs = Vec::new();
        for (a, b) in &pairs {
            cons.extend([a, b]);
            rhs.extend([false, false]);
        }
        for (j, d) in centers.iter().enumerate() {
            cons.push(d);
            rhs.push(j == k);
        }
        for e in &partners {
            cons.push(e);
            rhs.push(false);
        }
        partners.push(solve_partner(n, &cons, &rhs)?);
    }
    pairs.extend(centers.iter().cloned().zip(partners));

    let candidates = (0..n).flat_map(|q| [SignedPauli::x_on(n, q), SignedPauli::z_on(n, q)]);
    for mut v in candidates {
        if pairs.len() >= n {
            break;
        }
        for (a, b) in &pairs {
            let (wa, wb) = (!v.commutes(a), !v.commutes(b));
            if wb {
                v = v.mul_phased(a)?.1;
            }
            if wa {
                v = v.mul_phased(b)?.1;
            }
        }
        if v.is_identity() {
            continue;
        }
        let mut cons: Vec<&SignedPauli> = Vec::new();
        let mut rhs = Vec::new();
        for (a, b) in &pairs {
            cons.extend([a, b]);
            rhs.extend([false, false]);
        }
        cons.push(&v);
        rhs.push(true);
        let w = solve_partner(n, &cons, &rhs)?;
        pairs.push((v, w));
    }
    if pairs.len() != n {
        return Err(CliffordError::NotSymplectic);
    }
    Ok(pairs.into_iter().flat_map(|(a, b)| [a, b]).collect())
}
