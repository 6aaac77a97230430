//! Clifford localization of a rotation acting on an SPD.
//!
//! A Clifford `V` is built so that every projector of the SPD, conjugated by
//! `V`, factors as `|0⟩⟨0|^{⊗l} ⊗ A″ ⊗ I` and the rotation Pauli is supported
//! on the middle block. The rotation then only needs to be resolved on that
//! small active block.

use crate::clifford::CliffordTableau;
use crate::gf2;
use crate::pauli::SignedPauli;
use crate::spd::Spd;
use crate::stabilizer::StabilizerProjector;

use super::AtpgError;

/// Outcome of localizing a rotation on an SPD.
///
/// Qubit layout after conjugation by `u_c`: `[0, l)` is the zero block,
/// `[l, l + active_block)` the active block, and the remaining
/// `identity_block` qubits carry the identity.
#[derive(Debug, Clone)]
pub struct LocalizationResult {
    pub u_c: CliffordTableau,
    pub trivial_rank_block: usize,
    pub active_block: usize,
    pub identity_block: usize,
    /// The SPD restricted to the active block (same coefficients).
    pub local_spd: Spd,
    /// Rotation Pauli on the active block, with the original angle.
    pub local_rotation: (SignedPauli, f64),
}

impl LocalizationResult {
    fn active_wires(&self) -> Vec<usize> {
        (self.trivial_rank_block..self.trivial_rank_block + self.active_block).collect()
    }

    fn zero_block(&self, n: usize) -> Vec<SignedPauli> {
        (0..self.trivial_rank_block).map(|q| SignedPauli::z_on(n, q)).collect()
    }

    /// `|0⟩⟨0|^{⊗l} ⊗ local ⊗ I` as a projector on the full register.
    pub fn lift_local(&self, local: &StabilizerProjector) -> StabilizerProjector {
        let n = self.u_c.num_qubits();
        let wires = self.active_wires();
        let mut gens = self.zero_block(n);
        gens.extend(local.generators().iter().map(|g| g.embed(n, &wires)));
        StabilizerProjector::canonicalize(n, &gens).expect("disjoint blocks commute")
    }

    /// Checks the factorization literally: each term of `s` conjugated by
    /// `u_c` must equal the lifted local term in canonical form, and the
    /// rotation Pauli must map onto the active block.
    pub fn factorizes(&self, s: &Spd, rotation: &SignedPauli) -> bool {
        if s.len() != self.local_spd.len() {
            return false;
        }
        let n = self.u_c.num_qubits();
        let mapped = match s.conjugate_tableau(&self.u_c) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let lifted = self.local_spd.map_projectors(n, |p| self.lift_local(p));
        if mapped != lifted {
            return false;
        }
        let (local_pauli, _) = &self.local_rotation;
        match self.u_c.conjugate(rotation) {
            Ok(image) => image == local_pauli.embed(n, &self.active_wires()),
            Err(_) => false,
        }
    }
}

fn unsigned_product(a: &SignedPauli, b: &SignedPauli) -> SignedPauli {
    a.mul_phased(b).expect("same register").1.unsigned()
}

/// Reorders a generating set of Paulis into a maximal independent `t`-normal
/// set of its span: the first `t` elements commute with everything, the rest
/// come in pairs that anticommute only with each other. Signs are dropped.
pub fn normal_set(paulis: &[SignedPauli]) -> (Vec<SignedPauli>, usize) {
    let mut rows: Vec<gf2::BitRow> = Vec::new();
    let mut rest: Vec<SignedPauli> = Vec::new();
    for p in paulis {
        let row = gf2::pauli_row(p);
        if p.is_identity() || gf2::express(&rows, &row).is_some() {
            continue;
        }
        rows.push(row);
        rest.push(p.unsigned());
    }

    let mut centers = Vec::new();
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let a = rest.remove(0);
        let Some(pos) = rest.iter().position(|c| !c.commutes(&a)) else {
            centers.push(a);
            continue;
        };
        let b = rest.remove(pos);
        for c in rest.iter_mut() {
            if !c.commutes(&a) {
                *c = unsigned_product(c, &b);
            }
            if !c.commutes(&b) {
                *c = unsigned_product(c, &a);
            }
        }
        pairs.push(a);
        pairs.push(b);
    }
    let t = centers.len();
    centers.extend(pairs);
    (centers, t)
}

/// Signed intersection of all projector groups of `s`.
fn common_group(s: &Spd) -> Result<StabilizerProjector, AtpgError> {
    let mut terms = s.terms().iter();
    let first = terms.next().ok_or(AtpgError::EmptySpd)?;
    let mut acc = first.proj.clone();
    for t in terms {
        if acc.is_identity() {
            break;
        }
        acc = acc.intersect(&t.proj)?;
    }
    Ok(acc)
}

/// Commuting generators of the common group, arranged so that `rotation`
/// commutes with all of them.
fn commuting_generators(common: &StabilizerProjector, rotation: &SignedPauli) -> Result<Vec<SignedPauli>, AtpgError> {
    let mut gens = common.generators().to_vec();
    let Some(last) = gens.iter().rposition(|g| !g.commutes(rotation)) else {
        return Ok(gens);
    };
    let pivot = gens.remove(last);
    for g in gens.iter_mut() {
        if !g.commutes(rotation) {
            *g = g.product(&pivot)?;
        }
    }
    Ok(gens)
}

/// Embeds a tableau on the trailing `n - offset` qubits into `n` qubits.
fn embed_tableau(t: &CliffordTableau, n: usize, offset: usize) -> Result<CliffordTableau, AtpgError> {
    let wires: Vec<usize> = (offset..n).collect();
    let mut xs: Vec<SignedPauli> = (0..offset).map(|q| SignedPauli::x_on(n, q)).collect();
    let mut zs: Vec<SignedPauli> = (0..offset).map(|q| SignedPauli::z_on(n, q)).collect();
    for q in 0..t.num_qubits() {
        xs.push(t.x_image(q).embed(n, &wires));
        zs.push(t.z_image(q).embed(n, &wires));
    }
    Ok(CliffordTableau::from_images(xs, zs)?)
}

/// Localizes the rotation about `rotation` (angle `theta`, kept as metadata)
/// on `s`.
///
/// Fails with [`AtpgError::FixedPoint`] when `rotation` commutes with every
/// generator of every term, since the rotation then leaves `s` unchanged.
pub fn loc_expl(rotation: &SignedPauli, theta: f64, s: &Spd) -> Result<LocalizationResult, AtpgError> {
    let n = s.num_qubits();
    if rotation.num_qubits() != n {
        return Err(AtpgError::QubitMismatch(n, rotation.num_qubits()));
    }
    if rotation.is_identity() {
        return Err(AtpgError::FixedPoint);
    }
    if s.is_empty() {
        return Err(AtpgError::EmptySpd);
    }
    let all_commute = s.terms().iter().all(|t| t.proj.generators().iter().all(|g| g.commutes(rotation)));
    if all_commute {
        return Err(AtpgError::FixedPoint);
    }

    let common = common_group(s)?;
    let hats = commuting_generators(&common, rotation)?;
    let l = hats.len();
    let mut pairs: Vec<(SignedPauli, SignedPauli)> =
        hats.iter().enumerate().map(|(j, g)| (g.clone(), SignedPauli::z_on(n, j))).collect();
    pairs.push((rotation.clone(), SignedPauli::z_on(n, l)));
    let v1 = CliffordTableau::from_pauli_map(n, &pairs)?;

    // Restrict every term to the qubits after the zero block.
    let m = n - l;
    let mut candidates = vec![SignedPauli::z_on(m, 0)];
    for t in s.terms() {
        let mapped = t.proj.map_generators(|g| v1.conjugate(g).expect("same register"));
        let (c, restricted) = mapped.project_zero(l)?;
        debug_assert_eq!(c, 1.0, "zero block lies in every group");
        candidates.extend(restricted.generators().iter().cloned());
    }
    let (q, t) = normal_set(&candidates);
    let active = (q.len() + t) / 2;

    let mut v2_pairs = Vec::with_capacity(q.len());
    for (j, p) in q[..t].iter().enumerate() {
        v2_pairs.push((p.clone(), SignedPauli::z_on(m, j)));
    }
    for (k, pair) in q[t..].chunks(2).enumerate() {
        v2_pairs.push((pair[0].clone(), SignedPauli::z_on(m, t + k)));
        v2_pairs.push((pair[1].clone(), SignedPauli::x_on(m, t + k)));
    }
    let v2 = CliffordTableau::from_pauli_map(m, &v2_pairs)?;
    let u_c = v1.then(&embed_tableau(&v2, n, l)?)?;

    let active_wires: Vec<usize> = (l..l + active).collect();
    let mut local_terms = Vec::with_capacity(s.len());
    for term in s.terms() {
        let mapped = term.proj.map_generators(|g| u_c.conjugate(g).expect("same register"));
        let (_, restricted) = mapped.project_zero(l)?;
        let local_wires: Vec<usize> = (0..active).collect();
        let gens: Vec<SignedPauli> = restricted.generators().iter().map(|g| g.restrict(&local_wires)).collect();
        local_terms.push((term.coeff, StabilizerProjector::canonicalize(active, &gens)?));
    }
    let local_spd = Spd::from_terms(active, local_terms);
    let local_pauli = u_c.conjugate(rotation)?.restrict(&active_wires);

    Ok(LocalizationResult {
        u_c,
        trivial_rank_block: l,
        active_block: active,
        identity_block: n - l - active,
        local_spd,
        local_rotation: (local_pauli, theta),
    })
}
