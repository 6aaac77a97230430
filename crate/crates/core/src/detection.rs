//! Fault-detection experiments: candidate selection, the min-threshold
//! decision rule, and confusion-matrix reporting.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atpg::{self, AtpgError, GenerationOptions, TestPattern};
use crate::circuit::{inject_fault, Circuit, CircuitError, FaultModel};
use crate::discrim::{self, DiscrimError};
use crate::numeric::TOL;
use crate::sampler::{self, ExecutorKind, SamplerError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("threshold tau must lie in [0, 0.5), got {0}")]
    BadTau(f64),
    #[error("only {found} sites reach success probability {min_success:.3}; {wanted} requested")]
    TooFewCandidates { found: usize, wanted: usize, min_success: f64 },
    #[error("candidate count k must be positive")]
    ZeroCandidates,
    #[error(transparent)]
    Atpg(#[from] AtpgError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Discrim(#[from] DiscrimError),
}

/// Which fault each gate site may carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultFamily {
    /// Every gate may be missing.
    AllMissing,
    /// Only the listed sites, each with its own fault.
    Explicit(Vec<(usize, FaultModel)>),
}

impl FaultFamily {
    /// Sites and their faults for a circuit of `len` gates.
    pub fn sites(&self, len: usize) -> Vec<(usize, FaultModel)> {
        match self {
            FaultFamily::AllMissing => (0..len).map(|s| (s, FaultModel::MissingGate)).collect(),
            FaultFamily::Explicit(list) => list.iter().filter(|(s, _)| *s < len).cloned().collect(),
        }
    }
}

/// Parameters of the detection procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Number of candidate fault sites tested per CUT.
    pub k: usize,
    /// Candidates need Helstrom success probability at least `0.5 + tau`.
    pub tau: f64,
    pub delta: f64,
    /// Overall failure budget; each pattern gets `epsilon / k`.
    pub epsilon: f64,
    pub seed: u64,
    /// The CUT is declared faulty when the smallest estimate is at most this.
    pub threshold: f64,
    pub executor: ExecutorKind,
    pub dense_cap: usize,
    pub family: FaultFamily,
    /// Draw fresh candidates for every experiment trial.
    pub redraw_candidates: bool,
    #[serde(skip)]
    pub generation: GenerationOptions,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            k: 10,
            tau: 0.1,
            delta: 0.3,
            epsilon: 0.3,
            seed: 0,
            threshold: 0.5,
            executor: ExecutorKind::Auto,
            dense_cap: TOL.dense_cap,
            family: FaultFamily::AllMissing,
            redraw_candidates: false,
            generation: GenerationOptions::default(),
        }
    }
}

impl DetectionConfig {
    pub fn per_pattern_epsilon(&self) -> f64 {
        self.epsilon / self.k as f64
    }

    fn validate(&self) -> Result<(), DetectionError> {
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return Err(DetectionError::BadTau(self.tau));
        }
        if self.k == 0 {
            return Err(DetectionError::ZeroCandidates);
        }
        Ok(())
    }
}

/// Derived seed for a labelled sub-task.
pub fn sub_seed(root: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.gen()
}

/// Helstrom success probability of each site's fault, `None` when the fault
/// is undetectable.
pub fn site_success(c: &Circuit, family: &FaultFamily) -> Result<Vec<(usize, FaultModel, Option<f64>)>, DetectionError> {
    family
        .sites(c.len())
        .into_par_iter()
        .map(|(site, fm)| match discrim::gate_pattern(c, site, &fm) {
            Ok(p) => Ok((site, fm, Some(p.p_success))),
            Err(DiscrimError::Undetectable(_)) => Ok((site, fm, None)),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// `k` distinct sites whose faults reach success probability `0.5 + tau`,
/// drawn uniformly.
pub fn select_candidates<R: Rng + ?Sized>(
    c: &Circuit,
    family: &FaultFamily,
    k: usize,
    tau: f64,
    rng: &mut R,
) -> Result<Vec<(usize, FaultModel)>, DetectionError> {
    if !(0.0..0.5).contains(&tau) {
        return Err(DetectionError::BadTau(tau));
    }
    let min_success = 0.5 + tau;
    let eligible: Vec<(usize, FaultModel)> = site_success(c, family)?
        .into_iter()
        .filter_map(|(s, fm, p)| p.filter(|&p| p >= min_success - 1e-12).map(|_| (s, fm)))
        .collect();
    if eligible.len() < k {
        return Err(DetectionError::TooFewCandidates { found: eligible.len(), wanted: k, min_success });
    }
    let mut chosen: Vec<(usize, FaultModel)> = eligible.choose_multiple(rng, k).cloned().collect();
    chosen.sort_by_key(|(s, _)| *s);
    Ok(chosen)
}

/// The candidates an experiment with `cfg` uses when they are not re-drawn.
pub fn seeded_candidates(c: &Circuit, cfg: &DetectionConfig) -> Result<Vec<(usize, FaultModel)>, DetectionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, 0, 0));
    select_candidates(c, &cfg.family, cfg.k, cfg.tau, &mut rng)
}

/// Verdict of one detection run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Detection {
    pub faulty: bool,
    pub min_estimate: f64,
    /// `(site, estimate)` per candidate pattern.
    pub estimates: Vec<(usize, f64)>,
}

/// Applies every pattern to `cut` with failure budget `epsilon / k` each and
/// applies the min-threshold rule.
pub fn detect(cut: &Circuit, patterns: &[TestPattern], cfg: &DetectionConfig, seed: u64) -> Result<Detection, DetectionError> {
    let executor = cfg.executor.build(cfg.dense_cap);
    let eps = cfg.epsilon / patterns.len().max(1) as f64;
    let estimates = patterns
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let s = sub_seed(seed, 1, i as u64);
            let r = sampler::run_test_application(&p.spd_rho, &p.spd_m, cut, executor.as_ref(), cfg.delta, eps, s)?;
            Ok((p.site, r.estimate))
        })
        .collect::<Result<Vec<_>, DetectionError>>()?;
    let min_estimate = estimates.iter().map(|&(_, m)| m).fold(f64::INFINITY, f64::min);
    Ok(Detection { faulty: min_estimate <= cfg.threshold, min_estimate, estimates })
}

/// Generates the patterns of the candidate sites, in parallel.
pub fn candidate_patterns(
    c: &Circuit,
    candidates: &[(usize, FaultModel)],
    opts: &GenerationOptions,
) -> Result<Vec<TestPattern>, DetectionError> {
    candidates
        .par_iter()
        .map(|(site, fm)| atpg::generate_test_patterns(c, *site, fm, opts).map_err(DetectionError::from))
        .collect()
}

/// One experiment trial.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub actually_faulty: bool,
    pub fault_site: Option<usize>,
    pub predicted_faulty: bool,
    pub min_estimate: f64,
    pub candidates: Vec<usize>,
    pub estimates: Vec<(usize, f64)>,
}

/// Confusion counts and metrics of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DetectionReport {
    pub benchmark: String,
    pub trials: usize,
    pub config: DetectionConfig,
    /// Candidates of the first trial (all trials unless re-drawn).
    pub candidates: Vec<usize>,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    /// Metrics whose denominator was zero (reported as 1.0).
    pub undefined: Vec<String>,
    pub rows: Vec<TrialRow>,
    pub wall_time_s: f64,
}

impl DetectionReport {
    fn from_rows(benchmark: String, config: DetectionConfig, candidates: Vec<usize>, rows: Vec<TrialRow>, wall: f64) -> Self {
        let count = |a: bool, p: bool| rows.iter().filter(|r| r.actually_faulty == a && r.predicted_faulty == p).count();
        let (tp, tn, fp, fn_) = (count(true, true), count(false, false), count(false, true), count(true, false));
        let mut undefined = Vec::new();
        let mut ratio = |num: usize, den: usize, name: &str| {
            if den == 0 {
                undefined.push(name.to_string());
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp, "precision");
        let recall = ratio(tp, tp + fn_, "recall");
        let accuracy = ratio(tp + tn, rows.len(), "accuracy");
        DetectionReport {
            benchmark,
            trials: rows.len(),
            config,
            candidates,
            tp,
            tn,
            fp,
            fn_,
            precision,
            recall,
            accuracy,
            undefined,
            rows,
            wall_time_s: wall,
        }
    }

    /// Multi-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} trials, k={}, tau={}, delta={}, epsilon={}\n  TP={} TN={} FP={} FN={}\n  precision={:.3} recall={:.3} accuracy={:.3}{}\n  wall time {:.1}s",
            self.benchmark,
            self.trials,
            self.config.k,
            self.config.tau,
            self.config.delta,
            self.config.epsilon,
            self.tp,
            self.tn,
            self.fp,
            self.fn_,
            self.precision,
            self.recall,
            self.accuracy,
            if self.undefined.is_empty() { String::new() } else { format!(" (undefined: {})", self.undefined.join(", ")) },
            self.wall_time_s,
        )
    }
}

/// Repeats detection `trials` times on `c`. Each trial makes the CUT faulty
/// with probability one half, at a uniformly chosen candidate site.
pub fn run_experiment(
    name: &str,
    c: &Circuit,
    trials: usize,
    cfg: &DetectionConfig,
) -> Result<DetectionReport, DetectionError> {
    cfg.validate()?;
    let start = Instant::now();
    let fixed = seeded_candidates(c, cfg)?;
    let fixed_patterns = candidate_patterns(c, &fixed, &cfg.generation)?;

    let rows = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialRow, DetectionError> {
            let mut trng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, 2, t as u64));
            let (candidates, patterns) = if cfg.redraw_candidates {
                let cands = select_candidates(c, &cfg.family, cfg.k, cfg.tau, &mut trng)?;
                let pats = candidate_patterns(c, &cands, &cfg.generation)?;
                (cands, pats)
            } else {
                (fixed.clone(), fixed_patterns.clone())
            };
            let faulty = trng.gen_bool(0.5);
            let (cut, fault_site) = if faulty {
                let (site, fm) = candidates.choose(&mut trng).expect("k > 0");
                (inject_fault(c, *site, fm)?, Some(*site))
            } else {
                (c.clone(), None)
            };
            let d = detect(&cut, &patterns, cfg, sub_seed(cfg.seed, 3, t as u64))?;
            Ok(TrialRow {
                trial: t,
                actually_faulty: faulty,
                fault_site,
                predicted_faulty: d.faulty,
                min_estimate: d.min_estimate,
                candidates: candidates.iter().map(|(s, _)| *s).collect(),
                estimates: d.estimates,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let candidates = fixed.iter().map(|(s, _)| *s).collect();
    Ok(DetectionReport::from_rows(name.to_string(), cfg.clone(), candidates, rows, start.elapsed().as_secs_f64()))
}
