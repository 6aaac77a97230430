//! Dense and exhaustive oracles shared by the property and acceptance suites.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use num_complex::Complex64;
use rand::Rng;

use super::*;
use qatpg::atpg::{loc_expl, propagate_gate, Direction, PropagationCaps, StepMethod};
use qatpg::circuit::Gate;
use qatpg::clifford::{projector_prep_circuit, tableau_to_circuit};
use qatpg::dense::circuit_unitary;
use qatpg::spd::{enumerate_projectors, optimal_spd_for, pauli_coefficients, LexMethod, Objective};
use qatpg::stabilizer::dense_projector;

/// `⟨0…0| A |0…0⟩` over the leading `m` qubits (the low index bits).
pub fn dense_project_zero(a: &DenseOperator, m: usize) -> DenseOperator {
    let rest = a.num_qubits() - m;
    DenseOperator::from_fn(1 << rest, |i, j| a.get(i << m, j << m))
}

/// Partial trace over the leading `m` qubits.
pub fn dense_partial_trace(a: &DenseOperator, m: usize) -> DenseOperator {
    let rest = a.num_qubits() - m;
    DenseOperator::from_fn(1 << rest, |i, j| (0..1usize << m).map(|k| a.get((i << m) | k, (j << m) | k)).sum())
}

pub fn zero_block_tensor(m: usize, b: &DenseOperator) -> DenseOperator {
    let n = m + b.num_qubits();
    DenseOperator::from_fn(1 << n, |i, j| {
        if i & ((1 << m) - 1) == 0 && j & ((1 << m) - 1) == 0 {
            b.get(i >> m, j >> m)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn identity_tensor(m: usize, b: &DenseOperator) -> DenseOperator {
    let n = m + b.num_qubits();
    DenseOperator::from_fn(1 << n, |i, j| {
        if i & ((1 << m) - 1) == j & ((1 << m) - 1) {
            b.get(i >> m, j >> m)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Projection onto zero and partial trace of `a` on every leading block
/// agree with the dense computation, including the saturation cases.
pub fn check_block_reductions(a: &StabilizerProjector) {
    let n = a.num_qubits();
    let dense = dense_projector(a);
    for m in 0..=n {
        let (c, b) = a.project_zero(m).unwrap();
        assert!((0.0..=1.0).contains(&c), "c = {c}");
        let expect = dense_project_zero(&dense, m);
        let got = dense_projector(&b).scale_real(c);
        assert!(got.max_abs_diff(&expect) < 1e-10, "project_zero({m}) of {a}");
        if c == 1.0 {
            let diff = dense.sub(&zero_block_tensor(m, &dense_projector(&b)));
            assert!(min_eigenvalue(&diff) > -1e-9, "A ⊒ |0⟩⟨0| ⊗ B fails for {a}, m={m}");
        }

        let (c, b) = a.partial_trace(m).unwrap();
        assert!(c >= 0.0 && c <= (1u64 << m) as f64 + 1e-12);
        let expect = dense_partial_trace(&dense, m);
        assert!(dense_projector(&b).scale_real(c).max_abs_diff(&expect) < 1e-10, "partial_trace({m}) of {a}");
        if c == (1u64 << m) as f64 {
            assert!(identity_tensor(m, &dense_projector(&b)).max_abs_diff(&dense) < 1e-10);
        }
    }
}

/// `|0⟩⟨0|^{⊗(n−r)} ⊗ I_{2^r}` with the rank register on the trailing qubits.
pub fn zero_then_identity(n: usize, rank_qubits: usize) -> DenseOperator {
    let fixed = n - rank_qubits;
    let gens: Vec<SignedPauli> = (0..fixed).map(|q| SignedPauli::z_on(n, q)).collect();
    dense_projector(&StabilizerProjector::canonicalize(n, &gens).unwrap())
}

/// An independent set of `k` Paulis from the images of a random tableau,
/// together with a second random tableau's images of the same pattern.
pub fn random_pauli_map(n: usize, rng: &mut impl Rng) -> (Vec<(SignedPauli, SignedPauli)>, CliffordTableau) {
    let source = random_tableau(n, rng);
    let target = random_tableau(n, rng);
    let k = rng.gen_range(1..=2 * n);
    let mut basis: Vec<SignedPauli> = (0..n).flat_map(|q| [SignedPauli::x_on(n, q), SignedPauli::z_on(n, q)]).collect();
    for i in (1..basis.len()).rev() {
        basis.swap(i, rng.gen_range(0..=i));
    }
    let pairs = basis[..k]
        .iter()
        .map(|b| {
            let b = if rng.gen_bool(0.5) { b.negated() } else { b.clone() };
            (source.conjugate(&b).unwrap(), target.conjugate(&b).unwrap())
        })
        .collect();
    (pairs, target)
}

pub fn check_pauli_map(n: usize, seed: u64) {
    let mut r = rng(seed);
    let (pairs, _) = random_pauli_map(n, &mut r);
    let t = CliffordTableau::from_pauli_map(n, &pairs).unwrap();
    assert!(t.is_symplectic());
    for (p, q) in &pairs {
        assert_eq!(&t.conjugate(p).unwrap(), q);
    }
    // The synthesized circuit realizes the same map densely.
    let u = circuit_unitary(&tableau_to_circuit(&t)).unwrap();
    for (p, q) in &pairs {
        let conj = u.matmul(&DenseOperator::from_pauli(p)).matmul(&u.adjoint());
        assert!(conj.max_abs_diff(&DenseOperator::from_pauli(q)) < 1e-10);
    }
}

pub fn check_prep_circuit(n: usize, seed: u64) {
    let mut r = rng(seed);
    let a = random_projector(n, &mut r);
    let c = projector_prep_circuit(&a);
    assert!(c.gates().iter().all(|g| matches!(g, Gate::H(_) | Gate::S(_) | Gate::Cnot { .. } | Gate::X(_) | Gate::Z(_))));
    let mut base = zero_then_identity(n, a.log2_rank());
    base.conjugate_by_circuit(&c);
    assert!(base.max_abs_diff(&dense_projector(&a)) < 1e-10, "prep circuit of {a}");
}

pub fn xi(a: &DenseOperator) -> f64 {
    optimal_spd_for(a, Objective::Nu, LexMethod::Exact).unwrap().norms().nu
}

pub fn xi_star(a: &DenseOperator) -> f64 {
    optimal_spd_for(a, Objective::NuStar, LexMethod::Exact).unwrap().norms().nu_star
}

/// Real Pauli-basis vector of a projector: `±2^{-k}` on each group element.
pub fn column(p: &StabilizerProjector) -> Vec<f64> {
    let n = p.num_qubits();
    let mut v = vec![0.0; 1 << (2 * n)];
    let scale = 0.5f64.powi(p.num_generators() as i32);
    for e in p.elements() {
        v[e.unsigned().to_index() as usize] = if e.is_negative() { -scale } else { scale };
    }
    v
}

/// Solves the square system `m x = b` by Gaussian elimination; `None` when singular.
#[allow(clippy::needless_range_loop)]
pub fn solve_square(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let d = b.len();
    for c in 0..d {
        let p = (c..d).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(p, c);
        b.swap(p, c);
        for r in 0..d {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..d {
                    m[r][k] -= f * m[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..d).map(|i| b[i] / m[i][i]).collect())
}

/// Exhaustive vertex oracle for one qubit: every basis of four of the seven
/// projectors, minimum weighted L1 norm of the unique solution.
pub fn vertex_oracle(a: &DenseOperator, weight: impl Fn(&StabilizerProjector) -> f64) -> f64 {
    let projs = enumerate_projectors(1).unwrap();
    assert_eq!(projs.len(), 7);
    let cols: Vec<Vec<f64>> = projs.iter().map(column).collect();
    let b = pauli_coefficients(a);
    let mut best = f64::INFINITY;
    for mask in 0u32..1 << 7 {
        if mask.count_ones() != 4 {
            continue;
        }
        let chosen: Vec<usize> = (0..7).filter(|j| mask >> j & 1 == 1).collect();
        let m: Vec<Vec<f64>> = (0..4).map(|r| chosen.iter().map(|&j| cols[j][r]).collect()).collect();
        if let Some(x) = solve_square(m, b.clone()) {
            let value: f64 = chosen.iter().zip(&x).map(|(&j, xj)| weight(&projs[j]) * xj.abs()).sum();
            best = best.min(value);
        }
    }
    best
}

pub fn magic_state() -> DenseOperator {
    let psi = [Complex64::new(1.0 / SQRT_2, 0.0), Complex64::from_polar(1.0 / SQRT_2, FRAC_PI_4)];
    DenseOperator::outer(&psi)
}

/// Walks one propagation direction and checks every non-Clifford step: the
/// localization factorizes the SPD literally and the step result equals the
/// dense rotation conjugation.
pub fn check_walk(c: &Circuit, start: Spd, gates: Vec<usize>, direction: Direction) -> usize {
    let caps = PropagationCaps::default();
    let mut s = start;
    let mut checked = 0;
    for j in gates {
        let gate = match direction {
            Direction::Forward => c.gates()[j].clone(),
            Direction::Backward => c.gates()[j].inverse(),
        };
        let step = propagate_gate(&s, &c.gates()[j], direction, &caps).unwrap();
        if let Gate::Rotation { pauli, theta } = &gate {
            if !gate.is_clifford() {
                match loc_expl(pauli, *theta, &s) {
                    Ok(loc) => {
                        assert!(loc.factorizes(&s, pauli), "gate {j} does not factorize");
                        assert!(loc.active_block >= 1);
                        assert_eq!(loc.trivial_rank_block + loc.active_block + loc.identity_block, c.num_qubits());
                        checked += 1;
                    }
                    Err(e) => assert_eq!(step.method, StepMethod::FixedPoint, "gate {j}: {e}"),
                }
            }
        }
        let mut expect = s.reconstruct().unwrap();
        expect.conjugate_by_gate(&gate);
        assert!(step.spd.reconstruct().unwrap().max_abs_diff(&expect) < 1e-7, "gate {j} step is not exact");
        s = step.spd;
    }
    checked
}

pub fn random_paulis(n: usize, count: usize, rng: &mut impl Rng) -> Vec<SignedPauli> {
    (0..count).map(|_| SignedPauli::from_index(n, rng.gen_range(1..1u64 << (2 * n)))).collect()
}

/// Rank of a Pauli set over GF(2), via brute-force span enumeration.
pub fn span_size(set: &[SignedPauli]) -> usize {
    let mut span = std::collections::HashSet::new();
    span.insert(0u64);
    let mut elems = vec![SignedPauli::identity(set[0].num_qubits())];
    for p in set {
        let mut next = elems.clone();
        for e in &elems {
            let prod = e.mul_phased(p).unwrap().1.unsigned();
            if span.insert(prod.to_index()) {
                next.push(prod);
            }
        }
        elems = next;
    }
    span.len()
}

