//! Signed Pauli operators in the GF(2) symplectic representation.
//!
//! Each qubit carries an `(x, z)` bit pair: `I = 00`, `Z = 01`, `X = 10`,
//! `Y = 11`. The X-block and Z-block are packed into separate word vectors.
//! A [`SignedPauli`] always denotes a Hermitian operator `±P` where `P` is a
//! tensor product of `I, X, Y, Z`. Products that pick up a factor of `±i` are
//! reported through [`Phase`] and refused at the [`SignedPauli`] boundary.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by Pauli arithmetic and parsing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("product has imaginary phase and is not a signed Pauli")]
    ImaginaryPhase,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("cannot parse Pauli `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliKind::I,
            (false, true) => PauliKind::Z,
            (true, false) => PauliKind::X,
            (true, true) => PauliKind::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::I => (false, false),
            PauliKind::Z => (false, true),
            PauliKind::X => (true, false),
            PauliKind::Y => (true, true),
        }
    }

    fn letter(self) -> char {
        match self {
            PauliKind::I => 'I',
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
            PauliKind::Z => 'Z',
        }
    }
}

/// A power of `i`: `i^k` for `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn inverse(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// An `n`-qubit Pauli operator with a `±1` sign.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SignedPauli {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl SignedPauli {
    /// The `n`-qubit identity with `+` sign.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        SignedPauli { n, x: vec![0; w], z: vec![0; w], negative: false }
    }

    /// A single-qubit factor `kind` on qubit `q` (0-based), identity elsewhere.
    pub fn single(n: usize, q: usize, kind: PauliKind) -> Self {
        let mut p = Self::identity(n);
        p.set(q, kind);
        p
    }

    pub fn x_on(n: usize, q: usize) -> Self {
        Self::single(n, q, PauliKind::X)
    }

    pub fn z_on(n: usize, q: usize) -> Self {
        Self::single(n, q, PauliKind::Z)
    }

    /// Builds a Pauli from per-qubit factors.
    pub fn from_kinds(kinds: &[PauliKind], negative: bool) -> Self {
        let mut p = Self::identity(kinds.len());
        for (q, &k) in kinds.iter().enumerate() {
            p.set(q, k);
        }
        p.negative = negative;
        p
    }

    /// Builds a Pauli from little-endian bit vectors over the qubits.
    pub fn from_bits(x: &[bool], z: &[bool], negative: bool) -> Self {
        assert_eq!(x.len(), z.len());
        let mut p = Self::identity(x.len());
        for q in 0..x.len() {
            p.set(q, PauliKind::from_bits(x[q], z[q]));
        }
        p.negative = negative;
        p
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>, negative: bool) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        SignedPauli { n, x, z, negative }
    }

    /// Packs the Pauli into a `2n`-bit index: bit `2q` is `z_q`, bit `2q+1` is `x_q`.
    /// Only valid for `n <= 32`.
    pub fn to_index(&self) -> u64 {
        assert!(self.n <= 32);
        let mut idx = 0u64;
        for q in 0..self.n {
            let (x, z) = self.kind(q).bits();
            idx |= (z as u64) << (2 * q);
            idx |= (x as u64) << (2 * q + 1);
        }
        idx
    }

    /// Inverse of [`SignedPauli::to_index`] with `+` sign.
    pub fn from_index(n: usize, idx: u64) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            let z = (idx >> (2 * q)) & 1 == 1;
            let x = (idx >> (2 * q + 1)) & 1 == 1;
            p.set(q, PauliKind::from_bits(x, z));
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set_x_bit(&mut self, q: usize, v: bool) {
        let mask = 1u64 << (q % 64);
        if v {
            self.x[q / 64] |= mask;
        } else {
            self.x[q / 64] &= !mask;
        }
    }

    pub fn set_z_bit(&mut self, q: usize, v: bool) {
        let mask = 1u64 << (q % 64);
        if v {
            self.z[q / 64] |= mask;
        } else {
            self.z[q / 64] &= !mask;
        }
    }

    pub fn kind(&self, q: usize) -> PauliKind {
        PauliKind::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, kind: PauliKind) {
        let (x, z) = kind.bits();
        self.set_x_bit(q, x);
        self.set_z_bit(q, z);
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.negative = !p.negative;
        p
    }

    /// Same Pauli string with `+` sign.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.negative = false;
        p
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// True when the bit vectors agree (signs ignored).
    pub fn same_string(&self, other: &SignedPauli) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// True when `self` and `other` commute.
    pub fn commutes(&self, other: &SignedPauli) -> bool {
        !self.symplectic(other)
    }

    /// Symplectic inner product: true when the operators anticommute.
    pub fn symplectic(&self, other: &SignedPauli) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity & 1 == 1
    }

    /// `self * other` as `phase * R` with `R` carrying a `+` sign.
    pub fn mul_phased(&self, other: &SignedPauli) -> Result<(Phase, SignedPauli), PauliError> {
        if self.n != other.n {
            return Err(PauliError::QubitMismatch(self.n, other.n));
        }
        let exponent = product_exponent(&self.x, &self.z, &other.x, &other.z)
            + if self.negative { 2 } else { 0 }
            + if other.negative { 2 } else { 0 };
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Ok((Phase::from_exponent(exponent), SignedPauli { n: self.n, x, z, negative: false }))
    }

    /// Product of two signed Paulis when the phase is real.
    pub fn product(&self, other: &SignedPauli) -> Result<SignedPauli, PauliError> {
        let (phase, mut r) = self.mul_phased(other)?;
        match phase {
            Phase::ONE => Ok(r),
            Phase::MINUS_ONE => {
                r.negative = true;
                Ok(r)
            }
            _ => Err(PauliError::ImaginaryPhase),
        }
    }

    /// Embeds this Pauli into `n` qubits, placing local qubit `k` on `wires[k]`.
    pub fn embed(&self, n: usize, wires: &[usize]) -> SignedPauli {
        assert_eq!(wires.len(), self.n);
        let mut p = SignedPauli::identity(n);
        for (k, &w) in wires.iter().enumerate() {
            p.set(w, self.kind(k));
        }
        p.negative = self.negative;
        p
    }

    /// Restricts to the given wires; caller guarantees the support lies inside.
    pub fn restrict(&self, wires: &[usize]) -> SignedPauli {
        let mut p = SignedPauli::identity(wires.len());
        for (k, &w) in wires.iter().enumerate() {
            p.set(k, self.kind(w));
        }
        p.negative = self.negative;
        p
    }

    /// Parses the text form, e.g. `-X1*Z3`, `+Y2`, `I`.
    pub fn parse(text: &str, n: usize) -> Result<Self, PauliError> {
        let err = |reason: &str| PauliError::Parse { text: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        let (negative, body) = if let Some(rest) = t.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (false, rest)
        } else {
            (false, t)
        };
        let mut p = SignedPauli::identity(n);
        p.negative = negative;
        if body == "I" {
            return Ok(p);
        }
        if body.is_empty() {
            return Err(err("empty operator"));
        }
        for factor in body.split('*') {
            let mut chars = factor.chars();
            let kind = match chars.next() {
                Some('X') => PauliKind::X,
                Some('Y') => PauliKind::Y,
                Some('Z') => PauliKind::Z,
                Some('I') => PauliKind::I,
                _ => return Err(err("expected one of I, X, Y, Z")),
            };
            let index: usize = chars.as_str().parse().map_err(|_| err("expected a 1-based qubit index"))?;
            if index == 0 || index > n {
                return Err(PauliError::QubitOutOfRange { index, n });
            }
            if p.kind(index - 1) != PauliKind::I {
                return Err(err("qubit appears twice"));
            }
            p.set(index - 1, kind);
        }
        Ok(p)
    }

    /// Parses the text form, taking the qubit count as the largest index used.
    pub fn parse_infer(text: &str) -> Result<Self, PauliError> {
        let max = text
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|s| s.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        Self::parse(text, max.max(1))
    }
}

/// Exponent `k` such that `P_a P_b = i^k R` for unsigned strings, ignoring signs.
pub(crate) fn product_exponent(ax: &[u64], az: &[u64], bx: &[u64], bz: &[u64]) -> i64 {
    let mut plus = 0i64;
    let mut minus = 0i64;
    for w in 0..ax.len() {
        let (a_x, a_z, b_x, b_z) = (ax[w], az[w], bx[w], bz[w]);
        let a_is_x = a_x & !a_z;
        let a_is_y = a_x & a_z;
        let a_is_z = !a_x & a_z;
        let b_is_x = b_x & !b_z;
        let b_is_y = b_x & b_z;
        let b_is_z = !b_x & b_z;
        // XY = iZ, YZ = iX, ZX = iY and the reverse orders give -i.
        let p = (a_is_x & b_is_y) | (a_is_y & b_is_z) | (a_is_z & b_is_x);
        let m = (a_is_x & b_is_z) | (a_is_y & b_is_x) | (a_is_z & b_is_y);
        plus += p.count_ones() as i64;
        minus += m.count_ones() as i64;
    }
    plus - minus
}

/// `P * Q` as `(phase, R)` with `R` unsigned.
pub fn pauli_mul(p: &SignedPauli, q: &SignedPauli) -> Result<(Phase, SignedPauli), PauliError> {
    p.mul_phased(q)
}

/// True when `P` and `Q` commute.
pub fn commutes(p: &SignedPauli, q: &SignedPauli) -> bool {
    p.commutes(q)
}

/// True when the unsigned bit vectors are linearly independent over GF(2).
pub fn independent(set: &[SignedPauli]) -> bool {
    crate::gf2::rank(&set.iter().map(crate::gf2::pauli_row).collect::<Vec<_>>()) == set.len()
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for q in 0..self.n {
            let k = self.kind(q);
            if k != PauliKind::I {
                if !first {
                    write!(f, "*")?;
                }
                write!(f, "{}{}", k.letter(), q + 1)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[n={}]", self, self.n)
    }
}

/// Serialized as `"n:text"` so the qubit count survives a round trip.
impl From<SignedPauli> for String {
    fn from(p: SignedPauli) -> String {
        format!("{}:{}", p.n, p)
    }
}

impl TryFrom<String> for SignedPauli {
    type Error = PauliError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        let (n, body) = s.split_once(':').ok_or_else(|| PauliError::Parse {
            text: s.clone(),
            reason: "expected `n:operator`".into(),
        })?;
        let n = n.parse().map_err(|_| PauliError::Parse { text: s.clone(), reason: "bad qubit count".into() })?;
        SignedPauli::parse(body, n)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}
