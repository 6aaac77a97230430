//! L1-optimal SPDs: independent oracles, invariances and channel terms.

mod common;

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use proptest::prelude::*;
use rand::Rng;

use common::oracles::*;
use common::*;
use qatpg::lp::{self, SparseColumn};
use qatpg::pauli::SignedPauli;
use qatpg::spd::{
    self, apply_rotation_via_channels, enumerate_projectors, optimal_spd_for, pauli_coefficients,
    rotation_channel_terms, LexMethod, Objective, SparsifyOptions, Spd,
};
use qatpg::stabilizer::dense_projector;
use qatpg::Gate;

#[test]
fn magic_state_optimum_is_root_two() {
    let t = magic_state();
    let oracle = vertex_oracle(&t, |_| 1.0);
    assert!((oracle - SQRT_2).abs() < 1e-9, "oracle {oracle}");
    assert!((xi(&t) - SQRT_2).abs() < 1e-6);
    assert!((xi_star(&t) - SQRT_2).abs() < 1e-6);
}

#[test]
fn one_qubit_optima_match_the_vertex_oracle() {
    let mut r = rng(21);
    for _ in 0..100 {
        let a = random_effect(1, &mut r);
        assert!((xi(&a) - vertex_oracle(&a, |_| 1.0)).abs() < 1e-6);
        assert!((xi_star(&a) - vertex_oracle(&a, |p| p.trace())).abs() < 1e-6);
    }
}

#[test]
fn two_qubit_optima_do_not_depend_on_column_order() {
    let projs = enumerate_projectors(2).unwrap();
    let mut order: Vec<usize> = (0..projs.len()).rev().collect();
    let mut r = rng(22);
    for _ in 0..30 {
        for i in (1..order.len()).rev() {
            order.swap(i, r.gen_range(0..=i));
        }
        let a = random_effect(2, &mut r);
        let columns: Vec<SparseColumn> = order
            .iter()
            .map(|&j| column(&projs[j]).into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect())
            .collect();
        let unit = vec![1.0; columns.len()];
        let sol = lp::solve_l1(16, &columns, &pauli_coefficients(&a), &[unit]).unwrap();
        assert!((sol.values[0] - xi(&a)).abs() < 1e-6);
    }
}

#[test]
fn lexicographic_solution_keeps_the_primary_optimum() {
    let mut r = rng(23);
    for _ in 0..30 {
        let a = random_effect(2, &mut r);
        let pure = optimal_spd_for(&a, Objective::Nu, LexMethod::Exact).unwrap().norms();
        let lex = optimal_spd_for(&a, Objective::LexNuThenNuStar, LexMethod::Exact).unwrap().norms();
        assert!((lex.nu - pure.nu).abs() < 1e-6);
        assert!(lex.nu_star <= pure.nu_star + 1e-6);
        let pert = optimal_spd_for(&a, Objective::LexNuThenNuStar, LexMethod::Perturbation { epsilon: 1e-3 }).unwrap().norms();
        assert!((pert.nu - pure.nu).abs() < 1e-6);
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn channel_terms_at_quarter_pi() {
    let (ci, cz, cs) = rotation_channel_terms(FRAC_PI_4);
    assert!((ci - 0.5).abs() < 1e-12);
    assert!((cz - (1.0 - SQRT_2) / 2.0).abs() < 1e-12);
    assert!((cz + 0.20711).abs() < 1e-5);
    assert!((cs - 0.70711).abs() < 1e-5);
    assert!((ci.abs() + cz.abs() + cs.abs() - SQRT_2).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn channel_decomposition_reconstructs_rotations(seed in any::<u64>(), theta in -3.1f64..3.1) {
        let mut r = rng(seed);
        let s = random_spd(2, r.gen_range(1..5), &mut r);
        let p = SignedPauli::from_index(2, r.gen_range(1..16));
        let p = if r.gen_bool(0.5) { p.negated() } else { p };
        let mut expect = s.reconstruct().unwrap();
        expect.conjugate_by_gate(&Gate::Rotation { pauli: p.clone(), theta });
        let got = apply_rotation_via_channels(&s, &p, theta).reconstruct().unwrap();
        prop_assert!(got.max_abs_diff(&expect) < 1e-7);
    }

    #[test]
    fn optimum_is_clifford_invariant(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = random_effect(n, &mut r);
        let mut b = a.clone();
        b.conjugate_by_circuit(&random_clifford_circuit(n, 10, &mut r));
        prop_assert!((xi(&a) - xi(&b)).abs() < 1e-6);
        prop_assert!((xi_star(&a) - xi_star(&b)).abs() < 1e-6);
    }

    #[test]
    fn optimum_is_tensor_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_effect(1, &mut r);
        let s = random_projector(1, &mut r);
        // S on qubit 0, A on qubit 1.
        let sa = a.embed_with_rest(2, &[1], &dense_projector(&s));
        prop_assert!((xi(&sa) - xi(&a)).abs() < 1e-6);
        prop_assert!((xi_star(&sa) - s.trace() * xi_star(&a)).abs() < 1e-6);
    }

    #[test]
    fn optimal_decompositions_reconstruct(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_effect(n, &mut r);
        let s = spd::optimal_spd(&a, Objective::LexNuStarThenNu).unwrap();
        prop_assert!(s.reconstruct().unwrap().max_abs_diff(&a) < 1e-7);
    }

    #[test]
    fn sparsify_preserves_the_operator(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_spd(3, r.gen_range(2..12), &mut r);
        let opts = SparsifyOptions::default();
        let out = spd::sparsify(&s, &opts).unwrap();
        prop_assert!(out.reconstruct().unwrap().max_abs_diff(&s.reconstruct().unwrap()) < 1e-7);
        prop_assert!(out.norms().nu <= s.norms().nu + 1e-7);
        prop_assert!(out.len() <= s.len());
    }
}

#[test]
fn serialized_spd_round_trips() {
    let mut r = rng(24);
    let s: Spd = random_spd(3, 6, &mut r);
    let text = serde_json::to_string(&s).unwrap();
    let back: Spd = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}
