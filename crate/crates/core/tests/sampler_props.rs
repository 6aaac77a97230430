//! Quasiprobability sampling and detection experiments.

mod common;

use rand::Rng;

use common::*;
use qatpg::atpg::generate_test_patterns;
use qatpg::circuit::{inject_fault, qft_circuit, Benchmark, Circuit, FaultModel};
use qatpg::dense::expectation;
use qatpg::detection::{run_experiment, DetectionConfig};
use qatpg::sampler::{
    exact_expectation, required_trials, run_test_application, run_trials, DenseExecutor, SamplingPlan,
    TableauExecutor,
};
use qatpg::spd::Spd;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn trial_count_formula() {
    // (2/δ²) ln(2/ε) with δ = ε = 0.3 and unit overhead.
    assert_eq!(required_trials(0.3, 0.3, 1.0, 1.0).unwrap(), 43);
    assert_eq!(required_trials(0.3, 0.3, 1.0, 1.8478).unwrap(), 144);
    assert!(required_trials(0.0, 0.3, 1.0, 1.0).is_err());
    assert!(required_trials(0.3, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn exact_expectation_is_success_probability_or_its_complement() {
    let c = qft_circuit(3);
    for site in [0usize, 4, 12] {
        let p = generate_test_patterns(&c, site, &FaultModel::MissingGate, &Default::default()).unwrap();
        let ok = exact_expectation(&p.spd_rho, &p.spd_m, &c).unwrap();
        assert!((ok - p.p_success).abs() < 1e-6, "site {site}");
        let faulty = inject_fault(&c, site, &FaultModel::MissingGate).unwrap();
        let bad = exact_expectation(&p.spd_rho, &p.spd_m, &faulty).unwrap();
        assert!((bad - (1.0 - p.p_success)).abs() < 1e-6, "site {site}");
    }
}

#[test]
fn estimator_is_unbiased() {
    let c = qft_circuit(3);
    let p = generate_test_patterns(&c, 12, &FaultModel::MissingGate, &Default::default()).unwrap();
    let plan = SamplingPlan::new(&p.spd_rho, &p.spd_m, 0.3, 0.3).unwrap();
    for (cut, seed) in [(c.clone(), 1u64), (inject_fault(&c, 12, &FaultModel::MissingGate).unwrap(), 2)] {
        let exact = exact_expectation(&p.spd_rho, &p.spd_m, &cut).unwrap();
        let n = 40_000;
        let records = run_trials(&plan, &cut, &DenseExecutor::default(), seed, n).unwrap();
        let sigma = plan.overhead / (n as f64).sqrt();
        assert!((mean(&records) - exact).abs() < 5.0 * sigma, "mean {} exact {}", mean(&records), exact);
    }
}

#[test]
fn hoeffding_coverage_on_clifford_circuits() {
    let c = Benchmark::Bv(5).circuit();
    let mut r = rng(41);
    let (delta, epsilon) = (0.3, 0.3);
    let mut inside = 0;
    let runs = 200;
    for k in 0..runs {
        let rho = random_spd(5, 3, &mut r);
        let rho = rho.scaled(1.0 / rho.trace());
        let m = random_spd(5, 2, &mut r);
        let m = m.scaled(1.0 / m.norms().nu);
        let exact = exact_expectation(&rho, &m, &c).unwrap();
        let res = run_test_application(&rho, &m, &c, &TableauExecutor, delta, epsilon, k).unwrap();
        if (res.estimate - exact).abs() <= delta {
            inside += 1;
        }
    }
    assert!(inside as f64 / runs as f64 >= 1.0 - epsilon, "{inside}/{runs}");
}

/// Two-sample chi-square statistic over the categories `{−o, 0, +o}`.
fn chi_square(a: &[f64], b: &[f64]) -> (f64, usize) {
    let cat = |v: f64| if v < 0.0 { 0 } else if v == 0.0 { 1 } else { 2 };
    let mut ca = [0f64; 3];
    let mut cb = [0f64; 3];
    a.iter().for_each(|&v| ca[cat(v)] += 1.0);
    b.iter().for_each(|&v| cb[cat(v)] += 1.0);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut stat = 0.0;
    let mut used = 0;
    for k in 0..3 {
        let total = ca[k] + cb[k];
        if total == 0.0 {
            continue;
        }
        used += 1;
        let ea = total * na / (na + nb);
        let eb = total * nb / (na + nb);
        stat += (ca[k] - ea).powi(2) / ea + (cb[k] - eb).powi(2) / eb;
    }
    (stat, used.max(1) - 1)
}

#[test]
fn dense_and_tableau_executors_agree() {
    // 99.9% quantiles of chi-square with 1 and 2 degrees of freedom.
    let critical = [0.0, 10.83, 13.82];
    let mut r = rng(42);
    for case in 0..6 {
        let c: Circuit = random_clifford_circuit(3, 15, &mut r);
        let rho: Spd = random_spd(3, 3, &mut r);
        let m: Spd = random_spd(3, 3, &mut r);
        let plan = SamplingPlan::new(&rho, &m, 0.3, 0.3).unwrap();
        let seed = r.gen();
        let dense = run_trials(&plan, &c, &DenseExecutor::default(), seed, 6000).unwrap();
        let tab = run_trials(&plan, &c, &TableauExecutor, seed ^ 0xabcdef, 6000).unwrap();
        let (stat, df) = chi_square(&dense, &tab);
        assert!(stat < critical[df], "case {case}: chi-square {stat} with {df} dof");
    }
}

#[test]
fn sampled_expectation_matches_dense_oracle() {
    let c = qft_circuit(3);
    let p = generate_test_patterns(&c, 4, &FaultModel::MissingGate, &Default::default()).unwrap();
    let mut rho = p.spd_rho.reconstruct().unwrap();
    rho.conjugate_by_circuit(&c);
    let dense = expectation(&p.spd_m.reconstruct().unwrap(), &rho);
    assert!((exact_expectation(&p.spd_rho, &p.spd_m, &c).unwrap() - dense).abs() < 1e-9);
}

#[test]
fn experiment_reports_are_reproducible() {
    let c = Benchmark::Bv(6).circuit();
    let cfg = DetectionConfig { k: 3, seed: 9, ..Default::default() };
    let strip = |mut r: qatpg::detection::DetectionReport| {
        r.wall_time_s = 0.0;
        serde_json::to_string(&r).unwrap()
    };
    let a = strip(run_experiment("bv6", &c, 12, &cfg).unwrap());
    let b = strip(run_experiment("bv6", &c, 12, &cfg).unwrap());
    assert_eq!(a, b);
    let other = strip(run_experiment("bv6", &c, 12, &DetectionConfig { seed: 10, ..cfg.clone() }).unwrap());
    assert_ne!(a, other);
}

#[test]
fn experiment_metrics_follow_the_confusion_counts() {
    let c = Benchmark::Bv(6).circuit();
    for redraw in [false, true] {
        let cfg = DetectionConfig { k: 3, seed: 4, redraw_candidates: redraw, ..Default::default() };
        let r = run_experiment("bv6", &c, 16, &cfg).unwrap();
        assert_eq!(r.tp + r.tn + r.fp + r.fn_, 16);
        assert_eq!(r.accuracy, (r.tp + r.tn) as f64 / 16.0);
        if r.tp + r.fp > 0 {
            assert_eq!(r.precision, r.tp as f64 / (r.tp + r.fp) as f64);
        }
        if r.tp + r.fn_ > 0 {
            assert_eq!(r.recall, r.tp as f64 / (r.tp + r.fn_) as f64);
        }
        for row in &r.rows {
            assert_eq!(row.candidates.len(), 3);
            assert_eq!(row.fault_site.is_some(), row.actually_faulty);
            if let Some(s) = row.fault_site {
                assert!(row.candidates.contains(&s));
            }
        }
    }
}
