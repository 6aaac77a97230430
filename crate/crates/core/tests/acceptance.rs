//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the binary
//! exits non-zero when any criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use common::oracles::*;
use common::*;
use qatpg::atpg::{generate_all, generate_test_patterns, normal_set, Direction, TestPattern};
use qatpg::circuit::{inject_fault, qft_circuit, Benchmark, Circuit, FaultModel, Gate};
use qatpg::clifford::projector_prep_circuit;
use qatpg::dense::DenseOperator;
use qatpg::detection::{run_experiment, DetectionConfig};
use qatpg::discrim;
use qatpg::pauli::SignedPauli;
use qatpg::sampler::{exact_expectation, run_test_application, DenseExecutor, TableauExecutor};
use qatpg::spd::{self, apply_rotation_via_channels, enumerate_projectors, rotation_channel_terms, Objective};

/// QFT_3 gate index of the mid-circuit `Rz(π/4)`.
const QFT3_SITE: usize = 12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if let Some(limit) = limit {
            if elapsed > limit {
                pass = false;
                detail.push_str(&format!("; over the {}s limit", limit.as_secs()));
            }
        }
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} [{id}] {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn qft3_pattern() -> TestPattern {
    generate_test_patterns(&qft_circuit(3), QFT3_SITE, &FaultModel::MissingGate, &Default::default()).unwrap()
}

fn small_pattern_reproduction() -> Outcome {
    let c = qft_circuit(3);
    assert!(matches!(&c.gates()[QFT3_SITE], Gate::Rotation { theta, .. } if within(theta.abs(), FRAC_PI_4, 1e-12)));
    let p = qft3_pattern();
    let (nu_star, nu) = (p.rho_norms.nu_star, p.m_norms.nu);
    let (rho_err, m_err) = p.dense_error(&c).unwrap();
    let pass = within(nu_star, 1.0, 0.01) && within(nu, 1.848, 0.02) && rho_err < 1e-6 && m_err < 1e-6;
    outcome(pass, format!("nu*={nu_star:.4} nu={nu:.4} dense errors {rho_err:.1e}/{m_err:.1e}"))
}

fn mean_norms(c: &Circuit) -> (f64, f64, usize, f64, f64) {
    let sites: Vec<usize> = (0..c.len()).collect();
    let patterns: Vec<TestPattern> = generate_all(c, &sites, &FaultModel::MissingGate, &Default::default())
        .into_iter()
        .filter_map(|(site, r)| match r {
            Ok(p) => Some(p),
            Err(qatpg::atpg::AtpgError::Undetectable(_)) => None,
            Err(e) => panic!("site {site}: {e}"),
        })
        .collect();
    let count = patterns.len() as f64;
    let nu_star = patterns.iter().map(|p| p.rho_norms.nu_star).sum::<f64>() / count;
    let nu = patterns.iter().map(|p| p.m_norms.nu).sum::<f64>() / count;
    // Size and depth of one sampled test circuit: input preparation, CUT and
    // measurement unpreparation from the leading terms.
    let (mut size, mut depth) = (0.0, 0.0);
    for p in &patterns {
        let prep = projector_prep_circuit(&p.spd_rho.terms()[0].proj);
        let unprep = projector_prep_circuit(&p.spd_m.terms()[0].proj).inverse();
        let full = prep.then(c).then(&unprep);
        size += full.size() as f64;
        depth += full.depth() as f64;
    }
    (nu_star, nu, patterns.len(), size / count, depth / count)
}

fn benchmark_means() -> Outcome {
    let qft5 = qft_circuit(5);
    let (qs, qn, qcount, qsize, qdepth) = mean_norms(&qft5);
    let bv10 = Benchmark::Bv(10).circuit();
    let (bs, bn, bcount, bsize, bdepth) = mean_norms(&bv10);
    let pass = within(qs, 1.70, 0.15 * 1.70) && within(qn, 3.38, 0.15 * 3.38) && bs <= 1.6 && bn <= 1.6;
    outcome(
        pass,
        format!(
            "QFT_5 ({qcount} sites, CUT {}/{}, test circuit {qsize:.0}/{qdepth:.0}) nu*={qs:.3} nu={qn:.3}; \
             BV_10 ({bcount} sites, CUT {}/{}, test circuit {bsize:.0}/{bdepth:.0}) nu*={bs:.3} nu={bn:.3}",
            qft5.size(),
            qft5.depth(),
            bv10.size(),
            bv10.depth()
        ),
    )
}

fn statistical_guarantee() -> Outcome {
    let c = qft_circuit(3);
    let p = qft3_pattern();
    let exact = exact_expectation(&p.spd_rho, &p.spd_m, &c).unwrap();
    let runs = 200;
    let inside = (0..runs)
        .filter(|&seed| {
            let r = run_test_application(&p.spd_rho, &p.spd_m, &c, &DenseExecutor::default(), 0.3, 0.3, seed).unwrap();
            (r.estimate - exact).abs() <= 0.3
        })
        .count();
    let rate = inside as f64 / runs as f64;
    outcome(rate >= 0.7, format!("{inside}/{runs} runs within 0.3 of {exact:.4} (rate {rate:.3})"))
}

fn detection(name: &str, c: &Circuit, seed: u64, min_precision: f64) -> Outcome {
    let cfg = DetectionConfig { k: 5, tau: 0.1, delta: 0.3, epsilon: 0.3, seed, ..Default::default() };
    let r = run_experiment(name, c, 40, &cfg).unwrap();
    outcome(
        r.recall == 1.0 && r.precision >= min_precision,
        format!("TP={} TN={} FP={} FN={} precision={:.3} recall={:.3}", r.tp, r.tn, r.fp, r.fn_, r.precision, r.recall),
    )
}

fn fault_detection_qft5() -> Outcome {
    detection("qft5", &qft_circuit(5), 5, 0.8)
}

fn fault_detection_bv10() -> Outcome {
    detection("bv10", &Benchmark::Bv(10).circuit(), 10, 1.0)
}

fn block_reductions() -> Outcome {
    let mut count = 0;
    for n in 1..=2 {
        for a in enumerate_projectors(n).unwrap() {
            check_block_reductions(a);
            count += 1;
        }
    }
    let all = enumerate_projectors(3).unwrap();
    let mut r = rng(501);
    for _ in 0..500 {
        check_block_reductions(all.choose(&mut r).unwrap());
        count += 1;
    }
    outcome(true, format!("{count} projectors agree with the dense reductions"))
}

fn optimum_invariances() -> Outcome {
    let mut r = rng(502);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = 1 + k % 2;
        let a = random_effect(n, &mut r);
        let mut b = a.clone();
        b.conjugate_by_circuit(&random_clifford_circuit(n, 10, &mut r));
        worst = worst.max((xi(&a) - xi(&b)).abs()).max((xi_star(&a) - xi_star(&b)).abs());
        // Tensor with a random stabilizer projector on one extra qubit.
        let s = random_projector(1, &mut r);
        let wires: Vec<usize> = (1..=n).collect();
        let sa = a.embed_with_rest(n + 1, &wires, &qatpg::stabilizer::dense_projector(&s));
        worst = worst.max((xi(&sa) - xi(&a)).abs()).max((xi_star(&sa) - s.trace() * xi_star(&a)).abs());
    }
    outcome(worst <= 1e-6, format!("largest deviation {worst:.1e} over 100 instances"))
}

fn constructive_round_trips() -> Outcome {
    for n in 1..=3 {
        for i in 0..200 {
            check_pauli_map(n, 5000 + 1000 * n as u64 + i);
            check_prep_circuit(n, 9000 + 1000 * n as u64 + i);
        }
    }
    outcome(true, "600 Pauli-map and 600 preparation round trips")
}

fn localization_steps() -> Outcome {
    let c = qft_circuit(3);
    let n = c.num_qubits();
    let mut checked = 0;
    for site in 0..c.len() {
        let Ok(gate) = discrim::gate_pattern(&c, site, &FaultModel::MissingGate) else { continue };
        let rho = spd::optimal_spd(&DenseOperator::outer(&gate.psi_in), Objective::LexNuStarThenNu).unwrap().embed(n, &gate.wires);
        let m = spd::optimal_spd(&DenseOperator::outer(&gate.omega), Objective::LexNuThenNuStar).unwrap().embed(n, &gate.wires);
        checked += check_walk(&c, rho, (0..site).rev().collect(), Direction::Backward);
        checked += check_walk(&c, m, (site + 1..c.len()).collect(), Direction::Forward);
    }
    let mut r = rng(504);
    for _ in 0..50 {
        let mut set = random_paulis(4, r.gen_range(2..=7), &mut r);
        let (basis, t) = normal_set(&set);
        for _ in 0..20 {
            set.shuffle(&mut r);
            let (other, t2) = normal_set(&set);
            assert_eq!((other.len(), t2), (basis.len(), t), "normal set shape depends on order");
        }
    }
    outcome(checked > 10, format!("{checked} localized steps dense-exact; normal sets stable over 20 orderings"))
}

fn magic_state_optimum() -> Outcome {
    let t = magic_state();
    let oracle = vertex_oracle(&t, |_| 1.0);
    let lp = xi(&t);
    outcome(within(oracle, SQRT_2, 1e-6) && within(lp, SQRT_2, 1e-6), format!("LP {lp:.9}, oracle {oracle:.9}"))
}

#[allow(clippy::approx_constant)]
fn channel_instantiation() -> Outcome {
    let (ci, cz, cs) = rotation_channel_terms(FRAC_PI_4);
    let (s, c) = FRAC_PI_4.sin_cos();
    let formula = ci == (1.0 + c - s) / 2.0 && cz == (1.0 - c - s) / 2.0 && cs == s;
    let rounded = within(ci, 0.5, 5e-6) && within(cz, -0.20711, 5e-6) && within(cs, 0.70711, 5e-6);
    let mut r = rng(506);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = random_spd(2, r.gen_range(1..5), &mut r);
        let p = SignedPauli::from_index(2, r.gen_range(1..16));
        let p = if r.gen_bool(0.5) { p.negated() } else { p };
        let theta = r.gen_range(-3.1..3.1);
        let mut expect = s.reconstruct().unwrap();
        expect.conjugate_by_gate(&Gate::Rotation { pauli: p.clone(), theta });
        worst = worst.max(apply_rotation_via_channels(&s, &p, theta).reconstruct().unwrap().max_abs_diff(&expect));
    }
    outcome(
        formula && rounded && worst <= 1e-7,
        format!("terms ({ci:.5}, {cz:.5}, {cs:.5}); largest reconstruction error {worst:.1e} over 200 SPDs"),
    )
}

fn large_clifford_circuit() -> Outcome {
    let c = Benchmark::Bv(100).circuit();
    let p = generate_test_patterns(&c, 0, &FaultModel::MissingGate, &Default::default()).unwrap();
    let r = run_test_application(&p.spd_rho, &p.spd_m, &c, &TableauExecutor, 0.3, 0.3, 7).unwrap();
    let faulty = inject_fault(&c, 0, &FaultModel::MissingGate).unwrap();
    let rf = run_test_application(&p.spd_rho, &p.spd_m, &faulty, &TableauExecutor, 0.3, 0.3, 8).unwrap();
    outcome(
        within(r.estimate, 1.0, 0.3),
        format!("{} qubits, {} trials, estimate {:.3} (faulty CUT {:.3})", c.num_qubits(), r.trials, r.estimate, rf.estimate),
    )
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    let min = |m: u64| Some(Duration::from_secs(60 * m));
    suite.run("1", "QFT_3 pattern norms and dense reconstruction", Some(Duration::from_secs(30)), small_pattern_reproduction);
    suite.run("2", "mean norms over QFT_5 and BV_10 sites", min(10), benchmark_means);
    suite.run("3", "Hoeffding guarantee over 200 seeded runs", min(5), statistical_guarantee);
    suite.run("4a", "fault detection on QFT_5", min(30), fault_detection_qft5);
    suite.run("4b", "fault detection on BV_10", min(30), fault_detection_bv10);
    suite.run("5a", "projector block reductions", None, block_reductions);
    suite.run("5b", "Clifford and tensor invariance of the optima", None, optimum_invariances);
    suite.run("5c", "Clifford synthesis round trips", None, constructive_round_trips);
    suite.run("5d", "localized propagation and normal sets", None, localization_steps);
    suite.run("5e", "magic-state optimum", None, magic_state_optimum);
    suite.run("6", "rotation channel terms", None, channel_instantiation);
    suite.run("7", "BV_100 on the tableau executor", min(1), large_clifford_circuit);
    if suite.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
