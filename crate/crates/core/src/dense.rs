//! Dense complex-matrix simulation used as ground truth and as the default
//! device executing circuits under test.
//!
//! Basis index bit `q` is the state of wire `q`, so wire 0 is least significant.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::numeric::{Tolerances, TOL};
use crate::pauli::SignedPauli;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("{n} qubits exceed the dense cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("slice bounds {i}..{j} invalid for {len} gates")]
    BadSlice { i: usize, j: usize, len: usize },
}

/// Square complex matrix of dimension `2^n`, row-major.
#[derive(Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "DenseOperator({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim.min(16) {
            for c in 0..self.dim.min(16) {
                let v = self.get(r, c);
                write!(f, " {:+.4}{:+.4}i", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds from a row-major entry list.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self, DenseError> {
        if !dim.is_power_of_two() {
            return Err(DenseError::NotPowerOfTwo(dim));
        }
        assert_eq!(data.len(), dim * dim);
        Ok(DenseOperator { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { diag[r] } else { ZERO })
    }

    /// Dense matrix of a signed Pauli.
    pub fn from_pauli(p: &SignedPauli) -> Self {
        let n = p.num_qubits();
        let dim = 1usize << n;
        let mut m = Self::zeros(dim);
        for col in 0..dim {
            let (row, amp) = pauli_action(p, col);
            m.data[row * dim + col] = amp;
        }
        m
    }

    /// `P · self` using the one-nonzero-per-column structure of `P`.
    pub fn left_mul_pauli(&self, p: &SignedPauli) -> DenseOperator {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for k in 0..d {
            let (row, amp) = pauli_action(p, k);
            let src = &self.data[k * d..(k + 1) * d];
            for (o, v) in out.data[row * d..(row + 1) * d].iter_mut().zip(src) {
                *o = amp * v;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self.get(r, c)).collect()
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out.data[r * d..(r + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply_to_vector(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim;
        (0..d).map(|r| (0..d).map(|c| self.data[r * d + c] * v[c]).sum()).collect()
    }

    pub fn adjoint(&self) -> DenseOperator {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: C64) -> DenseOperator {
        DenseOperator { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> DenseOperator {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &DenseOperator) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Distance to `other` after removing the best global phase.
    pub fn diff_up_to_phase(&self, other: &DenseOperator) -> f64 {
        let overlap: C64 = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.scale(phase).max_abs_diff(other)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.num_qubits())) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &DenseOperator) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for r in 0..d {
            for c in 0..d {
                acc += self.data[r * d + c] * other.data[c * d + r];
            }
        }
        acc
    }

    /// `U · self` for a gate `U`.
    pub fn apply_gate_left(&mut self, gate: &Gate) {
        let d = self.dim;
        for c in 0..d {
            apply_gate_strided(&mut self.data, c, d, d, gate);
        }
    }

    /// `self · U†` for a gate `U`.
    pub fn apply_gate_adjoint_right(&mut self, gate: &Gate) {
        let d = self.dim;
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for v in row.iter_mut() {
                *v = v.conj();
            }
            apply_gate_strided(row, 0, 1, d, gate);
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
    }

    /// `U · self · U†`.
    pub fn conjugate_by_gate(&mut self, gate: &Gate) {
        self.apply_gate_left(gate);
        self.apply_gate_adjoint_right(gate);
    }

    /// `C · self · C†` for a whole circuit.
    pub fn conjugate_by_circuit(&mut self, c: &Circuit) {
        for g in c.gates() {
            self.conjugate_by_gate(g);
        }
    }

    /// `self ⊗ rest` on `n` qubits, with local qubit `k` of `self` on
    /// `wires[k]` and `rest` acting on the remaining wires in ascending order.
    pub fn embed_with_rest(&self, n: usize, wires: &[usize], rest: &DenseOperator) -> DenseOperator {
        let others: Vec<usize> = (0..n).filter(|q| !wires.contains(q)).collect();
        assert_eq!(self.num_qubits(), wires.len());
        assert_eq!(rest.num_qubits(), others.len());
        let split = |idx: usize| {
            let pick = |ws: &[usize]| ws.iter().enumerate().fold(0, |acc, (k, &w)| acc | (((idx >> w) & 1) << k));
            (pick(wires), pick(&others))
        };
        DenseOperator::from_fn(1 << n, |r, c| {
            let ((rl, ro), (cl, co)) = (split(r), split(c));
            self.get(rl, cl) * rest.get(ro, co)
        })
    }

    /// `self ⊗ I` on `n` qubits; see [`DenseOperator::embed_with_rest`].
    pub fn embed(&self, n: usize, wires: &[usize]) -> DenseOperator {
        self.embed_with_rest(n, wires, &DenseOperator::identity(n - wires.len()))
    }

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
    /// the unitary whose columns are the eigenvectors.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, DenseOperator) {
        jacobi_eigen(self)
    }
}

/// `P|col⟩ = amp |row⟩`.
pub fn pauli_action(p: &SignedPauli, col: usize) -> (usize, C64) {
    let n = p.num_qubits();
    let mut row = col;
    let mut exponent = if p.is_negative() { 2 } else { 0 };
    for q in 0..n {
        let (x, z) = (p.x_bit(q), p.z_bit(q));
        let bit = (col >> q) & 1 == 1;
        if x {
            row ^= 1 << q;
        }
        if x && z {
            exponent += 1;
        }
        if z && bit {
            exponent += 2;
        }
    }
    (row, crate::pauli::Phase::from_exponent(exponent).to_complex())
}

/// Applies a gate to the vector `data[offset + k * stride]`, `k < dim`.
pub fn apply_gate_strided(data: &mut [C64], offset: usize, stride: usize, dim: usize, gate: &Gate) {
    let at = |k: usize| offset + k * stride;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match gate {
        Gate::H(q) => {
            let m = 1 << q;
            for k in 0..dim {
                if k & m == 0 {
                    let (a, b) = (data[at(k)], data[at(k | m)]);
                    data[at(k)] = (a + b) * s;
                    data[at(k | m)] = (a - b) * s;
                }
            }
        }
        Gate::S(q) | Gate::Sdg(q) | Gate::Z(q) => {
            let m = 1 << q;
            let f = match gate {
                Gate::S(_) => C64::new(0.0, 1.0),
                Gate::Sdg(_) => C64::new(0.0, -1.0),
                _ => C64::new(-1.0, 0.0),
            };
            for k in 0..dim {
                if k & m != 0 {
                    data[at(k)] *= f;
                }
            }
        }
        Gate::X(q) | Gate::Y(q) => {
            let m = 1 << q;
            let is_y = matches!(gate, Gate::Y(_));
            for k in 0..dim {
                if k & m == 0 {
                    let (a0, a1) = (data[at(k)], data[at(k | m)]);
                    if is_y {
                        data[at(k)] = a1 * C64::new(0.0, -1.0);
                        data[at(k | m)] = a0 * C64::new(0.0, 1.0);
                    } else {
                        data[at(k)] = a1;
                        data[at(k | m)] = a0;
                    }
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (mc, mt) = (1 << control, 1 << target);
            for k in 0..dim {
                if k & mc != 0 && k & mt == 0 {
                    data.swap(at(k), at(k | mt));
                }
            }
        }
        Gate::Swap(a, b) => {
            let (ma, mb) = (1 << a, 1 << b);
            for k in 0..dim {
                if k & ma != 0 && k & mb == 0 {
                    data.swap(at(k), at((k & !ma) | mb));
                }
            }
        }
        Gate::Rotation { pauli, theta } => {
            // (1 + e^{iθ})/2 · v + (1 - e^{iθ})/2 · P v
            let e = C64::from_polar(1.0, *theta);
            let alpha = (ONE + e) * 0.5;
            let beta = (ONE - e) * 0.5;
            let old: Vec<C64> = (0..dim).map(|k| data[at(k)]).collect();
            let mut out: Vec<C64> = old.iter().map(|v| v * alpha).collect();
            for (k, v) in old.iter().enumerate() {
                let (r, amp) = pauli_action(pauli, k);
                out[r] += amp * v * beta;
            }
            for (k, v) in out.into_iter().enumerate() {
                data[at(k)] = v;
            }
        }
    }
}

/// Dense statevector on at most the dense cap of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        StateVector { amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        StateVector { amps }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let d = self.amps.len();
        apply_gate_strided(&mut self.amps, 0, 1, d, g);
    }

    pub fn apply_circuit(&mut self, c: &Circuit) {
        for g in c.gates() {
            self.apply_gate(g);
        }
    }

    /// Probability that the wires in `mask` all read zero.
    pub fn prob_zero_on(&self, mask: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(k, _)| k & mask == 0).map(|(_, a)| a.norm_sqr()).sum()
    }
}

/// Checks the dense cap.
pub fn check_cap(n: usize, cap: usize) -> Result<(), DenseError> {
    if n > cap {
        Err(DenseError::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// Unitary of a whole circuit.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseOperator, DenseError> {
    circuit_unitary_capped(c, TOL.dense_cap)
}

pub fn circuit_unitary_capped(c: &Circuit, cap: usize) -> Result<DenseOperator, DenseError> {
    check_cap(c.num_qubits(), cap)?;
    let mut u = DenseOperator::identity(c.num_qubits());
    for g in c.gates() {
        u.apply_gate_left(g);
    }
    Ok(u)
}

/// `U_j ⋯ U_i` for 1-based inclusive gate indices; identity when `i > j`.
pub fn slice_unitary(c: &Circuit, i: usize, j: usize) -> Result<DenseOperator, DenseError> {
    check_cap(c.num_qubits(), TOL.dense_cap)?;
    if i > j {
        return Ok(DenseOperator::identity(c.num_qubits()));
    }
    if i == 0 || j > c.len() {
        return Err(DenseError::BadSlice { i, j, len: c.len() });
    }
    circuit_unitary(&c.slice(i - 1..j))
}

/// Unitary of a gate list acting on the local register `wires` (local qubit `k` is `wires[k]`).
pub fn local_unitary(gates: &[Gate], wires: &[usize]) -> DenseOperator {
    let n_local = wires.len();
    let mut u = DenseOperator::identity(n_local);
    for g in gates {
        let local = g.remap(n_local, &|w| wires.iter().position(|&x| x == w).expect("gate wire inside the local register"));
        u.apply_gate_left(&local);
    }
    u
}

/// `Re tr(M ρ)`.
pub fn expectation(m: &DenseOperator, rho: &DenseOperator) -> f64 {
    m.trace_product(rho).re
}

/// Draws the outcome of the two-outcome measurement `{B, I - B}` on `|ψ⟩`;
/// `true` means the `B` outcome.
pub fn born_sample<R: Rng + ?Sized>(state: &[C64], projector: &DenseOperator, rng: &mut R) -> bool {
    let bpsi = projector.apply_to_vector(state);
    let p: f64 = state.iter().zip(&bpsi).map(|(a, b)| (a.conj() * b).re).sum();
    rng.gen::<f64>() < p.clamp(0.0, 1.0)
}

/// Jacobi eigen-decomposition for complex Hermitian matrices.
fn jacobi_eigen(a: &DenseOperator) -> (Vec<f64>, DenseOperator) {
    let d = a.dim;
    let mut m = a.clone();
    let mut v = DenseOperator::identity(a.num_qubits());
    let scale = a.data.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..d).flat_map(|r| (0..d).filter(move |&c| c != r).map(move |c| (r, c))).map(|(r, c)| m.get(r, c).norm_sqr()).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag; // e^{iφ}
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // W = D·R with D = diag(.., e^{-iφ} at q, ..), R the real rotation.
                let w_pp = C64::new(c, 0.0);
                let w_pq = C64::new(s, 0.0);
                let w_qp = phase.conj() * (-s);
                let w_qq = phase.conj() * c;
                for k in 0..d {
                    let (akp, akq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, akp * w_pp + akq * w_qp);
                    m.set(k, q, akp * w_pq + akq * w_qq);
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, vkp * w_pp + vkq * w_qp);
                    v.set(k, q, vkp * w_pq + vkq * w_qq);
                }
                for k in 0..d {
                    let (apk, aqk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, w_pp.conj() * apk + w_qp.conj() * aqk);
                    m.set(q, k, w_pq.conj() * apk + w_qq.conj() * aqk);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    let evals: Vec<f64> = (0..d).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted_vals = order.iter().map(|&i| evals[i]).collect();
    let vecs = DenseOperator::from_fn(d, |r, c| v.get(r, order[c]));
    (sorted_vals, vecs)
}

/// Eigenvalue of a unitary with a normalized eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: C64,
    pub vector: Vec<C64>,
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [C64]) -> f64 {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Rotates `v` so its first significant entry is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    if let Some(first) = v.iter().find(|x| x.norm() > 1e-9).copied() {
        let ph = first.conj() / first.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

/// Eigen-decomposition of a unitary of dimension at most 16.
///
/// Degenerate eigenspaces get a canonical basis: computational basis vectors
/// are projected onto the eigenspace in index order and orthonormalized. Every
/// eigenvector has its first significant entry real and positive.
pub fn eig_unitary(u: &DenseOperator) -> Result<Vec<Eigenpair>, DenseError> {
    let tol = Tolerances::default();
    let dev = u.adjoint().matmul(u).max_abs_diff(&DenseOperator::identity(u.num_qubits()));
    if dev > tol.unitarity {
        return Err(DenseError::NotUnitary(dev));
    }
    let d = u.dim;
    let ud = u.adjoint();
    let h1 = u.add(&ud).scale_real(0.5);
    let h2 = u.sub(&ud).scale(C64::new(0.0, -0.5));
    let (vals1, v1) = h1.hermitian_eigen();
    // Refine inside clusters of equal real part with the imaginary part.
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (vals1[end] - vals1[start]).abs() < 1e-7 {
            end += 1;
        }
        let cols: Vec<Vec<C64>> = (start..end).map(|c| v1.column(c)).collect();
        if cols.len() == 1 {
            basis.push(cols[0].clone());
        } else {
            let k = cols.len();
            let sub = DenseOperator::from_fn(k.next_power_of_two(), |r, c| {
                if r < k && c < k {
                    inner(&cols[r], &h2.apply_to_vector(&cols[c]))
                } else {
                    ZERO
                }
            });
            let (_, w) = sub.hermitian_eigen();
            // Keep only eigenvectors living in the first k coordinates.
            let mut picked = 0;
            for c in 0..sub.dim {
                let col = w.column(c);
                if col[k..].iter().map(|x| x.norm_sqr()).sum::<f64>() > 1e-12 {
                    continue;
                }
                let mut vec = vec![ZERO; d];
                for (j, coeff) in col.iter().take(k).enumerate() {
                    for r in 0..d {
                        vec[r] += cols[j][r] * coeff;
                    }
                }
                basis.push(vec);
                picked += 1;
            }
            debug_assert_eq!(picked, k);
        }
        start = end;
    }
    let mut pairs: Vec<Eigenpair> = basis
        .into_iter()
        .map(|mut v| {
            normalize(&mut v);
            let lam = inner(&v, &u.apply_to_vector(&v));
            Eigenpair { value: lam / lam.norm(), vector: v }
        })
        .collect();
    canonicalize_eigenspaces(&mut pairs, tol.eigen_cluster);
    Ok(pairs)
}

fn canonicalize_eigenspaces(pairs: &mut Vec<Eigenpair>, cluster: f64) {
    let d = pairs.first().map(|p| p.vector.len()).unwrap_or(0);
    let mut out: Vec<Eigenpair> = Vec::new();
    let mut used = vec![false; pairs.len()];
    for i in 0..pairs.len() {
        if used[i] {
            continue;
        }
        let group: Vec<usize> =
            (i..pairs.len()).filter(|&j| !used[j] && (pairs[j].value - pairs[i].value).norm() < cluster).collect();
        for &j in &group {
            used[j] = true;
        }
        let value = pairs[i].value;
        let space: Vec<&Vec<C64>> = group.iter().map(|&j| &pairs[j].vector).collect();
        let mut found: Vec<Vec<C64>> = Vec::new();
        for e in 0..d {
            if found.len() == space.len() {
                break;
            }
            // Project |e⟩ onto the eigenspace.
            let mut v = vec![ZERO; d];
            for s in &space {
                let coeff = s[e].conj();
                for r in 0..d {
                    v[r] += s[r] * coeff;
                }
            }
            for f in &found {
                let ov = inner(f, &v);
                for r in 0..d {
                    v[r] -= f[r] * ov;
                }
            }
            if normalize(&mut v) > 1e-6 {
                fix_phase(&mut v);
                found.push(v);
            }
        }
        for v in found {
            out.push(Eigenpair { value, vector: v });
        }
    }
    *pairs = out;
}
