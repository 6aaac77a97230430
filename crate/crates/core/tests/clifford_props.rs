//! Clifford tableaus, synthesis and simulation against dense matrices.

mod common;

use proptest::prelude::*;

use common::oracles::*;
use common::*;
use qatpg::circuit::Circuit;
use qatpg::clifford::{projector_prep_circuit, tableau_to_circuit, CliffordTableau, StabilizerState};
use qatpg::dense::{circuit_unitary, DenseOperator, StateVector};
use qatpg::pauli::SignedPauli;
use qatpg::stabilizer::{dense_projector, StabilizerProjector};

#[test]
fn pauli_map_round_trips() {
    for n in 1..=3 {
        for i in 0..200 {
            check_pauli_map(n, 1000 * n as u64 + i);
        }
    }
}

#[test]
fn projector_prep_round_trips() {
    for n in 1..=3 {
        for i in 0..200 {
            check_prep_circuit(n, 7000 * n as u64 + i);
        }
    }
}

#[test]
fn mismatched_commutation_is_rejected() {
    let x = SignedPauli::x_on(1, 0);
    let z = SignedPauli::z_on(1, 0);
    assert!(CliffordTableau::from_pauli_map(1, &[(x.clone(), z.clone()), (z.clone(), z.clone())]).is_err());
    assert!(CliffordTableau::from_pauli_map(1, &[(x.clone(), z.clone()), (z.clone(), x.clone())]).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tableau_matches_circuit_unitary(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let c = random_clifford_circuit(n, 12, &mut r);
        let t = CliffordTableau::from_circuit(&c).unwrap();
        let u = circuit_unitary(&c).unwrap();
        for idx in 1..1u64 << (2 * n) {
            let p = SignedPauli::from_index(n, idx);
            let conj = u.matmul(&DenseOperator::from_pauli(&p)).matmul(&u.adjoint());
            prop_assert!(conj.max_abs_diff(&DenseOperator::from_pauli(&t.conjugate(&p).unwrap())) < 1e-10);
        }
    }

    #[test]
    fn inverse_and_composition(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let a = random_tableau(n, &mut r);
        let b = random_tableau(n, &mut r);
        prop_assert!(a.then(&a.inverse()).unwrap().is_identity());
        let ab = a.then(&b).unwrap();
        for idx in 1..1u64 << (2 * n.min(3)) {
            let p = SignedPauli::from_index(n, idx);
            prop_assert_eq!(ab.conjugate(&p).unwrap(), b.conjugate(&a.conjugate(&p).unwrap()).unwrap());
        }
        let synthesized = CliffordTableau::from_circuit(&tableau_to_circuit(&a)).unwrap();
        prop_assert_eq!(synthesized, a);
    }

    #[test]
    fn chp_outcome_distribution_matches_statevector(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let c = random_clifford_circuit(n, 10, &mut r);
        let mut sv = StateVector::basis(n, 0);
        sv.apply_circuit(&c);
        let mut st = StabilizerState::zero(n);
        st.apply_circuit(&c).unwrap();
        // A stabilizer state gives each qubit's all-zero probability in {0, 1/2^k}.
        for q in 0..n {
            let p0 = sv.prob_zero_on(1 << q);
            let shots = 64;
            let zeros = (0..shots).filter(|_| !st.clone().measure(q, &mut r)).count();
            if p0 < 1e-9 { prop_assert_eq!(zeros, 0); }
            else if p0 > 1.0 - 1e-9 { prop_assert_eq!(zeros, shots); }
            else { prop_assert!((p0 - 0.5).abs() < 1e-9 && zeros > 8 && zeros < 56); }
        }
    }
}

#[test]
fn bell_projector_prep_is_dense_exact() {
    let a = StabilizerProjector::parse("<X1*X2,Z1*Z2>", 2).unwrap();
    let c: Circuit = projector_prep_circuit(&a);
    let mut base = zero_then_identity(2, 0);
    base.conjugate_by_circuit(&c);
    assert!(base.max_abs_diff(&dense_projector(&a)) < 1e-12);
}
