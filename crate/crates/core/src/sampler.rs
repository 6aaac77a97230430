//! Quasiprobability test application.
//!
//! Each trial draws an input projector `A_i` with probability
//! `|a_i| tr A_i / ν*`, a measurement projector `B_j` with probability
//! `|b_j| / ν`, and a uniform basis state of the rank register of `A_i`. The
//! trial circuit prepares that state with the Clifford `U_{A_i}`, runs the
//! circuit under test, undoes `U_{B_j}` and checks that the leading qubits
//! read zero. The signed, rescaled success indicator is an unbiased estimate
//! of `tr(M · CUT ρ CUT†)`.

use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::clifford::{projector_prep_circuit, CliffordError, StabilizerState};
use crate::dense::{self, DenseError, StateVector};
use crate::numeric::TOL;
use crate::spd::{Spd, SpdError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("delta must be positive and epsilon in (0, 1); got delta={delta}, epsilon={epsilon}")]
    BadParameters { delta: f64, epsilon: f64 },
    #[error("SPD has no terms")]
    EmptySpd,
    #[error("SPD acts on {spd} qubits but the circuit has {circuit}")]
    QubitMismatch { spd: usize, circuit: usize },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Spd(#[from] SpdError),
}

/// `⌈(2/δ²) ln(2/ε) (ν*ν)²⌉`.
pub fn required_trials(delta: f64, epsilon: f64, nu_star: f64, nu: f64) -> Result<u64, SamplerError> {
    if delta.is_nan() || delta <= 0.0 || epsilon.is_nan() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(SamplerError::BadParameters { delta, epsilon });
    }
    let overhead = nu_star * nu;
    Ok((2.0 / (delta * delta) * (2.0 / epsilon).ln() * overhead * overhead).ceil() as u64)
}

/// Probability tables and trial count for one pattern.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    pub spd_rho: Spd,
    pub spd_m: Spd,
    pub trials: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub p_input: Vec<f64>,
    pub p_meas: Vec<f64>,
    /// `ν*(𝒜)·ν(ℬ)`.
    pub overhead: f64,
}

impl SamplingPlan {
    pub fn new(spd_rho: &Spd, spd_m: &Spd, delta: f64, epsilon: f64) -> Result<Self, SamplerError> {
        if spd_rho.is_empty() || spd_m.is_empty() {
            return Err(SamplerError::EmptySpd);
        }
        if spd_rho.num_qubits() != spd_m.num_qubits() {
            return Err(SamplerError::QubitMismatch { spd: spd_m.num_qubits(), circuit: spd_rho.num_qubits() });
        }
        let (a, b) = (spd_rho.norms(), spd_m.norms());
        let trials = required_trials(delta, epsilon, a.nu_star, b.nu)?;
        let p_input = spd_rho.terms().iter().map(|t| t.coeff.abs() * t.proj.trace() / a.nu_star).collect();
        let p_meas = spd_m.terms().iter().map(|t| t.coeff.abs() / b.nu).collect();
        Ok(SamplingPlan {
            spd_rho: spd_rho.clone(),
            spd_m: spd_m.clone(),
            trials,
            delta,
            epsilon,
            p_input,
            p_meas,
            overhead: a.nu_star * b.nu,
        })
    }
}

/// One trial circuit: `|0^{k_in}⟩|rank⟩ → prep → CUT → unprep`, then the
/// leading `measured` qubits are read.
pub struct TrialCircuit<'a> {
    pub prep: &'a Circuit,
    /// Qubits fixed to zero at the input; the rest carry `rank_bits`.
    pub fixed_inputs: usize,
    /// Bit `q - fixed_inputs` is the initial value of qubit `q`.
    pub rank_bits: &'a [bool],
    pub cut: &'a Circuit,
    pub unprep: &'a Circuit,
    pub measured: usize,
}

/// Device that runs trial circuits and reports whether all measured qubits
/// read zero.
pub trait CutExecutor: Sync {
    fn run(&self, trial: &TrialCircuit<'_>, rng: &mut dyn RngCore) -> Result<bool, SamplerError>;
    fn name(&self) -> &'static str;
}

/// Statevector simulation; samples the exact zero-outcome probability.
#[derive(Debug, Clone, Copy)]
pub struct DenseExecutor {
    pub cap: usize,
}

impl Default for DenseExecutor {
    fn default() -> Self {
        DenseExecutor { cap: TOL.dense_cap }
    }
}

impl CutExecutor for DenseExecutor {
    fn run(&self, trial: &TrialCircuit<'_>, rng: &mut dyn RngCore) -> Result<bool, SamplerError> {
        let n = trial.cut.num_qubits();
        dense::check_cap(n, self.cap)?;
        let index = trial
            .rank_bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0usize, |acc, (k, _)| acc | 1 << (trial.fixed_inputs + k));
        let mut state = StateVector::basis(n, index);
        state.apply_circuit(trial.prep);
        state.apply_circuit(trial.cut);
        state.apply_circuit(trial.unprep);
        let mask = (1usize << trial.measured) - 1;
        let p = state.prob_zero_on(mask);
        Ok(rng.gen::<f64>() < p)
    }

    fn name(&self) -> &'static str {
        "dense"
    }
}

/// Stabilizer-tableau simulation; requires a Clifford CUT.
#[derive(Debug, Clone, Copy, Default)]
pub struct TableauExecutor;

impl CutExecutor for TableauExecutor {
    fn run(&self, trial: &TrialCircuit<'_>, rng: &mut dyn RngCore) -> Result<bool, SamplerError> {
        let n = trial.cut.num_qubits();
        let mut state = StabilizerState::zero(n);
        for (k, &b) in trial.rank_bits.iter().enumerate() {
            if b {
                state.apply_gate(&crate::Gate::X(trial.fixed_inputs + k))?;
            }
        }
        state.apply_circuit(trial.prep)?;
        state.apply_circuit(trial.cut)?;
        state.apply_circuit(trial.unprep)?;
        Ok(state.measure_all_zero(0..trial.measured, rng))
    }

    fn name(&self) -> &'static str {
        "tableau"
    }
}

/// Tableau when the CUT is Clifford, dense otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoExecutor {
    pub dense: DenseExecutor,
}

impl CutExecutor for AutoExecutor {
    fn run(&self, trial: &TrialCircuit<'_>, rng: &mut dyn RngCore) -> Result<bool, SamplerError> {
        if trial.cut.is_clifford() {
            TableauExecutor.run(trial, rng)
        } else {
            self.dense.run(trial, rng)
        }
    }

    fn name(&self) -> &'static str {
        "auto"
    }
}

/// Named executor choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutorKind {
    Dense,
    Tableau,
    Auto,
}

impl ExecutorKind {
    pub fn build(self, dense_cap: usize) -> Box<dyn CutExecutor> {
        match self {
            ExecutorKind::Dense => Box::new(DenseExecutor { cap: dense_cap }),
            ExecutorKind::Tableau => Box::new(TableauExecutor),
            ExecutorKind::Auto => Box::new(AutoExecutor { dense: DenseExecutor { cap: dense_cap } }),
        }
    }
}

impl std::str::FromStr for ExecutorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(ExecutorKind::Dense),
            "tableau" => Ok(ExecutorKind::Tableau),
            "auto" => Ok(ExecutorKind::Auto),
            other => Err(format!("unknown executor `{other}` (expected dense, tableau or auto)")),
        }
    }
}

/// Outcome of one test application.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SamplingResult {
    pub estimate: f64,
    pub trials: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub nu_star: f64,
    pub nu: f64,
    pub wall_time_s: f64,
    pub seed: u64,
    pub executor: String,
}

/// Random stream of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

struct PreparedPatterns {
    prep: Vec<Circuit>,
    unprep: Vec<Circuit>,
}

fn prepare(plan: &SamplingPlan) -> PreparedPatterns {
    let prep = plan.spd_rho.terms().par_iter().map(|t| projector_prep_circuit(&t.proj)).collect();
    let unprep = plan.spd_m.terms().par_iter().map(|t| projector_prep_circuit(&t.proj).inverse()).collect();
    PreparedPatterns { prep, unprep }
}

/// Corrected record `m̂` of every trial, in trial order.
pub fn run_trials(
    plan: &SamplingPlan,
    cut: &Circuit,
    executor: &dyn CutExecutor,
    seed: u64,
    trials: u64,
) -> Result<Vec<f64>, SamplerError> {
    let n = plan.spd_rho.num_qubits();
    if cut.num_qubits() != n {
        return Err(SamplerError::QubitMismatch { spd: n, circuit: cut.num_qubits() });
    }
    let circuits = prepare(plan);
    let input_dist = WeightedIndex::new(&plan.p_input).map_err(|_| SamplerError::EmptySpd)?;
    let meas_dist = WeightedIndex::new(&plan.p_meas).map_err(|_| SamplerError::EmptySpd)?;
    let a_terms = plan.spd_rho.terms();
    let b_terms = plan.spd_m.terms();
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let i = input_dist.sample(&mut rng);
            let j = meas_dist.sample(&mut rng);
            let fixed = a_terms[i].proj.num_generators();
            let rank_bits: Vec<bool> = (fixed..n).map(|_| rng.gen()).collect();
            let trial = TrialCircuit {
                prep: &circuits.prep[i],
                fixed_inputs: fixed,
                rank_bits: &rank_bits,
                cut,
                unprep: &circuits.unprep[j],
                measured: b_terms[j].proj.num_generators(),
            };
            let success = executor.run(&trial, &mut rng)?;
            let sign = (a_terms[i].coeff * b_terms[j].coeff).signum();
            Ok(if success { sign * plan.overhead } else { 0.0 })
        })
        .collect()
}

/// Estimates `tr(M · CUT ρ CUT†)` to additive error `delta` with probability
/// at least `1 − epsilon`.
pub fn run_test_application(
    spd_rho: &Spd,
    spd_m: &Spd,
    cut: &Circuit,
    executor: &dyn CutExecutor,
    delta: f64,
    epsilon: f64,
    seed: u64,
) -> Result<SamplingResult, SamplerError> {
    let start = Instant::now();
    let plan = SamplingPlan::new(spd_rho, spd_m, delta, epsilon)?;
    let records = run_trials(&plan, cut, executor, seed, plan.trials)?;
    let estimate = compensated_sum(records.iter().copied()) / plan.trials as f64;
    Ok(SamplingResult {
        estimate,
        trials: plan.trials,
        delta,
        epsilon,
        nu_star: spd_rho.norms().nu_star,
        nu: spd_m.norms().nu,
        wall_time_s: start.elapsed().as_secs_f64(),
        seed,
        executor: executor.name().to_string(),
    })
}

/// `tr(M · CUT ρ CUT†)` by dense simulation.
pub fn exact_expectation(spd_rho: &Spd, spd_m: &Spd, cut: &Circuit) -> Result<f64, SamplerError> {
    let n = cut.num_qubits();
    if spd_rho.num_qubits() != n || spd_m.num_qubits() != n {
        return Err(SamplerError::QubitMismatch { spd: spd_rho.num_qubits(), circuit: n });
    }
    let mut rho = spd_rho.reconstruct()?;
    rho.conjugate_by_circuit(cut);
    Ok(dense::expectation(&spd_m.reconstruct()?, &rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::StabilizerProjector;

    #[test]
    fn trial_counts() {
        assert_eq!(required_trials(0.1, 0.1, 1.0, 1.0).unwrap(), 600);
        assert_eq!(required_trials(0.3, 0.3, 1.0, 1.0).unwrap(), 43);
        assert!(required_trials(0.0, 0.1, 1.0, 1.0).is_err());
        assert!(required_trials(0.1, 1.0, 1.0, 1.0).is_err());
        let base = 2.0 / 0.01 * 20f64.ln();
        assert_eq!(required_trials(0.1, 0.1, 2.0, 1.0).unwrap(), (4.0 * base).ceil() as u64);
    }

    #[test]
    fn identity_cut_on_zero_state_is_deterministic() {
        let z = Spd::single(1.0, StabilizerProjector::parse("<Z1>", 2).unwrap());
        let rho = z.scaled(0.5);
        let cut = Circuit::new(2);
        for ex in [ExecutorKind::Dense, ExecutorKind::Tableau] {
            let r = run_test_application(&rho, &z, &cut, ex.build(12).as_ref(), 0.1, 0.1, 7).unwrap();
            assert_eq!(r.estimate, 1.0);
        }
    }

    #[test]
    fn identity_measurement_always_succeeds() {
        let rho = Spd::single(0.25, StabilizerProjector::identity(2));
        let m = Spd::single(1.0, StabilizerProjector::identity(2));
        let r = run_test_application(&rho, &m, &Circuit::new(2), &DenseExecutor::default(), 0.2, 0.2, 1).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!((exact_expectation(&rho, &m, &Circuit::new(2)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reproducible_given_seed() {
        let rho = Spd::from_terms(
            1,
            [(0.6, StabilizerProjector::parse("<X1>", 1).unwrap()), (0.4, StabilizerProjector::parse("<-Z1>", 1).unwrap())],
        );
        let m = Spd::single(1.0, StabilizerProjector::parse("<Z1>", 1).unwrap());
        let cut = Circuit::new(1);
        let a = run_test_application(&rho, &m, &cut, &DenseExecutor::default(), 0.1, 0.1, 3).unwrap();
        let b = run_test_application(&rho, &m, &cut, &DenseExecutor::default(), 0.1, 0.1, 3).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }
}
