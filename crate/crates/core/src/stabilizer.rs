//! Stabilizer groups and the projectors they define.
//!
//! A [`StabilizerProjector`] stores its group in reduced row echelon form over
//! GF(2) (X columns before Z columns) with signs carried through the row
//! operations. The canonical form is unique per signed group, so structural
//! equality is group equality.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2;
use crate::pauli::{words_for, PauliError, SignedPauli};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilizerError {
    #[error("generators {0} and {1} anticommute")]
    AntiCommuting(String, String),
    #[error("generators produce -I; the projector is zero")]
    NegativeIdentity,
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("block of {block} qubits exceeds {n}")]
    BlockTooLarge { block: usize, n: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("cannot parse projector `{0}`")]
    Parse(String),
}

/// Projector `Π (I + P_i) / 2` onto the joint `+1` eigenspace of a stabilizer group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StabilizerProjector {
    n: usize,
    generators: Vec<SignedPauli>,
}

fn column_bit(p: &SignedPauli, col: usize) -> bool {
    let w = words_for(p.num_qubits());
    let (word, bit) = (col / 64, col % 64);
    if word < w {
        (p.x_words()[word] >> bit) & 1 == 1
    } else {
        (p.z_words()[word - w] >> bit) & 1 == 1
    }
}

fn leading_column(p: &SignedPauli) -> Option<usize> {
    let w = words_for(p.num_qubits());
    for (i, &word) in p.x_words().iter().chain(p.z_words()).enumerate() {
        if word != 0 {
            return Some(i * 64 + word.trailing_zeros() as usize);
        }
    }
    let _ = w;
    None
}

/// Sign-tracked row reduction. Returns generators sorted by pivot column.
fn reduce(n: usize, gens: &[SignedPauli]) -> Result<Vec<SignedPauli>, StabilizerError> {
    let mut basis: Vec<(usize, SignedPauli)> = Vec::new();
    for g in gens {
        if g.num_qubits() != n {
            return Err(StabilizerError::QubitMismatch(n, g.num_qubits()));
        }
        let mut v = g.clone();
        for (p, b) in &basis {
            if column_bit(&v, *p) {
                v = v.product(b)?;
            }
        }
        match leading_column(&v) {
            None => {
                if v.is_negative() {
                    return Err(StabilizerError::NegativeIdentity);
                }
            }
            Some(p) => {
                for (_, b) in basis.iter_mut() {
                    if column_bit(b, p) {
                        *b = b.product(&v)?;
                    }
                }
                basis.push((p, v));
            }
        }
    }
    basis.sort_by_key(|(p, _)| *p);
    Ok(basis.into_iter().map(|(_, g)| g).collect())
}

impl StabilizerProjector {
    /// The identity operator on `n` qubits (trivial group).
    pub fn identity(n: usize) -> Self {
        StabilizerProjector { n, generators: Vec::new() }
    }

    /// Canonical projector of the group generated by `gens`.
    pub fn canonicalize(n: usize, gens: &[SignedPauli]) -> Result<Self, StabilizerError> {
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !a.commutes(b) {
                    return Err(StabilizerError::AntiCommuting(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(StabilizerProjector { n, generators: reduce(n, gens)? })
    }

    /// Computational basis projector `|bits⟩⟨bits|`.
    pub fn basis_state(bits: &[bool]) -> Self {
        let n = bits.len();
        let gens: Vec<_> = bits
            .iter()
            .enumerate()
            .map(|(q, &b)| {
                let mut z = SignedPauli::z_on(n, q);
                z.set_negative(b);
                z
            })
            .collect();
        StabilizerProjector { n, generators: reduce(n, &gens).expect("basis state generators are valid") }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[SignedPauli] {
        &self.generators
    }

    /// Number of independent generators `k`.
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// `log2` of the rank, `n - k`.
    pub fn log2_rank(&self) -> usize {
        self.n - self.generators.len()
    }

    /// Trace `2^(n-k)`.
    pub fn trace(&self) -> f64 {
        2f64.powi(self.log2_rank() as i32)
    }

    pub fn is_identity(&self) -> bool {
        self.generators.is_empty()
    }

    /// The signed group element whose bit string equals `p`'s, if `±p` is in the group.
    pub fn element_with_string(&self, p: &SignedPauli) -> Option<SignedPauli> {
        let mut acc = SignedPauli::identity(self.n);
        let mut residual = p.unsigned();
        for g in &self.generators {
            let col = leading_column(g).expect("generators are non-identity");
            if column_bit(&residual, col) {
                acc = acc.product(g).ok()?;
                residual = residual.mul_phased(g).ok()?.1;
            }
        }
        if residual.is_identity() {
            Some(acc)
        } else {
            None
        }
    }

    /// `Some(+1)` if `p` is in the group, `Some(-1)` if `-p` is, `None` otherwise.
    pub fn membership_sign(&self, p: &SignedPauli) -> Option<i8> {
        self.element_with_string(p).map(|e| if e.is_negative() == p.is_negative() { 1 } else { -1 })
    }

    /// True when every element of `other`'s group lies in this group.
    pub fn contains_group(&self, other: &StabilizerProjector) -> bool {
        other.generators.iter().all(|g| self.membership_sign(g) == Some(1))
    }

    /// All `2^k` group elements (only sensible for small `k`).
    pub fn elements(&self) -> Vec<SignedPauli> {
        let mut out = vec![SignedPauli::identity(self.n)];
        for g in &self.generators {
            let extra: Vec<_> = out.iter().map(|e| e.product(g).expect("group elements commute")).collect();
            out.extend(extra);
        }
        out
    }

    /// Signed intersection of two groups.
    ///
    /// Elements whose bit string lies in both groups but with opposite signs
    /// are dropped; the sign-consistent elements form a subgroup.
    pub fn intersect(&self, other: &StabilizerProjector) -> Result<Self, StabilizerError> {
        if self.n != other.n {
            return Err(StabilizerError::QubitMismatch(self.n, other.n));
        }
        let ra: Vec<_> = self.generators.iter().map(gf2::pauli_row).collect();
        let rb: Vec<_> = other.generators.iter().map(gf2::pauli_row).collect();
        let common = gf2::intersect_spaces(&ra, &rb);
        let mut consistent = Vec::new();
        let mut mismatched = Vec::new();
        for row in &common {
            let s = gf2::row_to_pauli(self.n, row);
            let ea = self.element_with_string(&s).expect("row lies in the first group");
            let eb = other.element_with_string(&s).expect("row lies in the second group");
            if ea.is_negative() == eb.is_negative() {
                consistent.push(ea);
            } else {
                mismatched.push(ea);
            }
        }
        if let Some((pivot, rest)) = mismatched.split_first() {
            for m in rest {
                consistent.push(m.product(pivot)?);
            }
        }
        Self::canonicalize(self.n, &consistent)
    }

    /// Symbolic `⟨0|^m A |0⟩^m = c·B` over the leading `m` qubits.
    ///
    /// Returns `c = 0` with the identity when the block projects to zero.
    pub fn project_zero(&self, m: usize) -> Result<(f64, StabilizerProjector), StabilizerError> {
        if m > self.n {
            return Err(StabilizerError::BlockTooLarge { block: m, n: self.n });
        }
        let rest: Vec<usize> = (m..self.n).collect();
        let mut gens = self.generators.clone();
        let mut c = 1.0;
        for q in 0..m {
            if let Some(pos) = gens.iter().position(|g| g.x_bit(q)) {
                let pivot = gens.remove(pos);
                for g in gens.iter_mut() {
                    if g.x_bit(q) {
                        *g = g.product(&pivot)?;
                    }
                }
                c *= 0.5;
            }
            for g in gens.iter_mut() {
                g.set_z_bit(q, false);
            }
            match reduce(self.n, &gens) {
                Ok(r) => gens = r,
                Err(StabilizerError::NegativeIdentity) => {
                    return Ok((0.0, StabilizerProjector::identity(self.n - m)))
                }
                Err(e) => return Err(e),
            }
        }
        let restricted: Vec<_> = gens.iter().map(|g| g.restrict(&rest)).collect();
        Ok((c, Self::canonicalize(self.n - m, &restricted)?))
    }

    /// Symbolic partial trace over the leading `m` qubits: `tr_m A = c·B`.
    pub fn partial_trace(&self, m: usize) -> Result<(f64, StabilizerProjector), StabilizerError> {
        if m > self.n {
            return Err(StabilizerError::BlockTooLarge { block: m, n: self.n });
        }
        let mut gens = self.generators.clone();
        let mut pivots = 0usize;
        for q in 0..m {
            for use_x in [true, false] {
                let bit = |g: &SignedPauli| if use_x { g.x_bit(q) } else { g.z_bit(q) };
                if let Some(pos) = gens.iter().position(bit) {
                    let pivot = gens.remove(pos);
                    for g in gens.iter_mut() {
                        if bit(g) {
                            *g = g.product(&pivot)?;
                        }
                    }
                    pivots += 1;
                }
            }
        }
        let rest: Vec<usize> = (m..self.n).collect();
        let restricted: Vec<_> = gens.iter().map(|g| g.restrict(&rest)).collect();
        let c = 2f64.powi(m as i32 - pivots as i32);
        Ok((c, Self::canonicalize(self.n - m, &restricted)?))
    }

    /// `tr(A B)` computed from the groups: zero when the common elements carry
    /// inconsistent signs, `2^(n + dim K - k_A - k_B)` otherwise.
    pub fn overlap_trace(&self, other: &StabilizerProjector) -> Result<f64, StabilizerError> {
        if self.n != other.n {
            return Err(StabilizerError::QubitMismatch(self.n, other.n));
        }
        let ra: Vec<_> = self.generators.iter().map(gf2::pauli_row).collect();
        let rb: Vec<_> = other.generators.iter().map(gf2::pauli_row).collect();
        let common = gf2::intersect_spaces(&ra, &rb);
        for row in &common {
            let s = gf2::row_to_pauli(self.n, row);
            let ea = self.element_with_string(&s).expect("row lies in the first group");
            let eb = other.element_with_string(&s).expect("row lies in the second group");
            if ea.is_negative() != eb.is_negative() {
                return Ok(0.0);
            }
        }
        let exp = self.n as i32 + common.len() as i32 - self.generators.len() as i32 - other.generators.len() as i32;
        Ok(2f64.powi(exp))
    }

    /// Tensor product `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StabilizerProjector) -> StabilizerProjector {
        let n = self.n + other.n;
        let left: Vec<usize> = (0..self.n).collect();
        let right: Vec<usize> = (self.n..n).collect();
        let gens: Vec<_> = self
            .generators
            .iter()
            .map(|g| g.embed(n, &left))
            .chain(other.generators.iter().map(|g| g.embed(n, &right)))
            .collect();
        StabilizerProjector::canonicalize(n, &gens).expect("disjoint supports commute")
    }

    /// Embeds into `n` qubits with local qubit `k` on `wires[k]`; identity elsewhere.
    pub fn embed(&self, n: usize, wires: &[usize]) -> StabilizerProjector {
        let gens: Vec<_> = self.generators.iter().map(|g| g.embed(n, wires)).collect();
        StabilizerProjector::canonicalize(n, &gens).expect("embedding preserves commutation")
    }

    /// Applies `f` to every generator and re-canonicalizes.
    pub fn map_generators<F>(&self, f: F) -> StabilizerProjector
    where
        F: Fn(&SignedPauli) -> SignedPauli,
    {
        let gens: Vec<_> = self.generators.iter().map(f).collect();
        let n = gens.first().map(|g| g.num_qubits()).unwrap_or(self.n);
        StabilizerProjector::canonicalize(n, &gens).expect("conjugation preserves the group structure")
    }

    /// Dense matrix `Π (I + P_i) / 2`.
    pub fn to_dense(&self) -> crate::dense::DenseOperator {
        let mut m = crate::dense::DenseOperator::identity(self.n);
        for g in &self.generators {
            m = m.add(&m.left_mul_pauli(g)).scale_real(0.5);
        }
        m
    }

    /// Parses `<-X3,Z1*Z2>` style text.
    pub fn parse(text: &str, n: usize) -> Result<Self, StabilizerError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| StabilizerError::Parse(text.to_string()))?;
        let gens = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| SignedPauli::parse(s, n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::canonicalize(n, &gens)
    }
}

/// Dense matrix of a stabilizer projector.
pub fn dense_projector(a: &StabilizerProjector) -> crate::dense::DenseOperator {
    a.to_dense()
}

impl fmt::Display for StabilizerProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for StabilizerProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[n={}]", self, self.n)
    }
}
