//! Random instances shared by the property suites.
#![allow(dead_code)]

pub mod oracles;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qatpg::circuit::{Circuit, Gate};
use qatpg::clifford::CliffordTableau;
use qatpg::dense::DenseOperator;
use qatpg::pauli::SignedPauli;
use qatpg::spd::Spd;
use qatpg::stabilizer::StabilizerProjector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random circuit over `{H, S, S†, X, Z, CNOT}`.
pub fn random_clifford_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        let q = rng.gen_range(0..n);
        let g = match rng.gen_range(0..6) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Sdg(q),
            3 => Gate::X(q),
            4 => Gate::Z(q),
            _ if n > 1 => {
                let mut t = rng.gen_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                Gate::cnot(q, t)
            }
            _ => Gate::H(q),
        };
        c.push(g).unwrap();
    }
    c
}

pub fn random_tableau(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    CliffordTableau::from_circuit(&random_clifford_circuit(n, 8 * n + 4, rng)).unwrap()
}

/// Random projector with `k` generators: a random Clifford image of
/// `±Z_0, …, ±Z_{k-1}`.
pub fn random_projector_with(n: usize, k: usize, rng: &mut impl Rng) -> StabilizerProjector {
    let t = random_tableau(n, rng);
    let gens: Vec<SignedPauli> = (0..k)
        .map(|q| {
            let z = SignedPauli::z_on(n, q);
            let z = if rng.gen_bool(0.5) { z.negated() } else { z };
            t.conjugate(&z).unwrap()
        })
        .collect();
    StabilizerProjector::canonicalize(n, &gens).unwrap()
}

pub fn random_projector(n: usize, rng: &mut impl Rng) -> StabilizerProjector {
    let k = rng.gen_range(0..=n);
    random_projector_with(n, k, rng)
}

/// Random normalized state vector.
pub fn random_state(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> =
        (0..1usize << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// Random Hermitian operator with spectrum in `[0, 1]`: a sub-normalized
/// mixture of pure states.
pub fn random_effect(n: usize, rng: &mut impl Rng) -> DenseOperator {
    let d = 1usize << n;
    let parts = rng.gen_range(1..=3);
    let weights: Vec<f64> = (0..parts).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum::<f64>() / rng.gen_range(0.3..1.0);
    let mut a = DenseOperator::zeros(d);
    for w in weights {
        a.add_scaled(w / total, &DenseOperator::outer(&random_state(n, rng)));
    }
    a
}

/// Random SPD with `terms` terms and coefficients in `[-1, 1]`.
pub fn random_spd(n: usize, terms: usize, rng: &mut impl Rng) -> Spd {
    Spd::from_terms(n, (0..terms).map(|_| (rng.gen_range(-1.0..1.0), random_projector(n, rng))).collect::<Vec<_>>())
}

/// Largest deviation from zero of the smallest eigenvalue.
pub fn min_eigenvalue(a: &DenseOperator) -> f64 {
    a.hermitian_eigen().0[0]
}
