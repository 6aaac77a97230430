//! `qatpg`: test pattern generation and fault detection for quantum circuits.

mod exit;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qatpg::atpg::{self, GenerationOptions, InputSelection, PropagationCaps, TestPattern};
use qatpg::circuit::{inject_fault, parse_circuit, Benchmark, Circuit, FaultModel};
use qatpg::detection::{self, DetectionConfig, FaultFamily};
use qatpg::numeric::TOL;
use qatpg::sampler::{self, ExecutorKind};

#[derive(Parser, Debug)]
#[command(name = "qatpg", version, about = "Test pattern generation and fault detection for quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the test pattern for one fault site.
    Gen {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        generation: Generation,
        /// 0-based gate index of the fault.
        #[arg(long)]
        site: usize,
        /// `missing` or `replace:FILE` (a circuit file holding the replacement gates).
        #[arg(long, default_value = "missing")]
        fault: String,
    },
    /// Generate test patterns for every gate site.
    GenAll {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        generation: Generation,
        #[arg(long, default_value = "missing")]
        fault: String,
    },
    /// Apply a saved test pattern to a circuit by quasiprobability sampling.
    Apply {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
        /// JSON test pattern produced by `gen`.
        #[arg(long)]
        pattern: PathBuf,
        /// Inject this fault into the circuit before applying the pattern.
        #[arg(long)]
        inject_site: Option<usize>,
        #[arg(long, default_value = "missing")]
        fault: String,
    },
    /// Decide whether a circuit is faulty using k candidate patterns.
    Detect {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        generation: Generation,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        detection: DetectionArgs,
        /// Inject a fault at this site of the circuit under test.
        #[arg(long)]
        inject_site: Option<usize>,
        #[arg(long, default_value = "missing")]
        fault: String,
    },
    /// Repeated detection with random fault injection; reports precision and recall.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        generation: Generation,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        detection: DetectionArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Draw fresh candidates for every trial.
        #[arg(long)]
        redraw: bool,
    },
    /// Print size statistics of a circuit.
    BenchInfo {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Circuit file, or a benchmark name such as `qft5`, `bv10`, `random4x10s7`.
    #[arg(long)]
    circuit: String,
    /// Write the JSON document here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct Generation {
    /// Largest active block solved exactly (at most 3).
    #[arg(long, default_value_t = TOL.local_cap)]
    local_cap: usize,
    /// Search eigenvector and phase choices of the local input with this many
    /// phase grid points instead of the canonical choice.
    #[arg(long)]
    search_phases: Option<usize>,
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto", value_parser = ExecutorKind::from_str)]
    executor: ExecutorKind,
    /// Largest register simulated densely.
    #[arg(long, default_value_t = TOL.dense_cap)]
    dense_cap: usize,
}

#[derive(Args, Debug)]
struct DetectionArgs {
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

fn load_circuit(spec: &str) -> Result<(String, Circuit)> {
    let path = PathBuf::from(spec);
    if path.is_file() {
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let c = parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.to_string());
        return Ok((name, c));
    }
    let bench = Benchmark::from_str(spec).with_context(|| format!("`{spec}` is neither a file nor a benchmark"))?;
    Ok((bench.to_string(), bench.circuit()))
}

fn parse_fault(spec: &str) -> Result<FaultModel> {
    if spec == "missing" {
        return Ok(FaultModel::MissingGate);
    }
    let Some(file) = spec.strip_prefix("replace:") else {
        bail!("fault must be `missing` or `replace:FILE`, got `{spec}`");
    };
    let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
    let c = parse_circuit(&text).with_context(|| format!("parsing {file}"))?;
    Ok(FaultModel::ReplacedBy(c.gates().to_vec()))
}

impl Generation {
    fn options(&self) -> Result<GenerationOptions> {
        if self.local_cap > 3 {
            bail!("--local-cap must be at most 3");
        }
        let input = match self.search_phases {
            None => InputSelection::Canonical,
            Some(phase_steps) => InputSelection::Search { phase_steps: phase_steps.max(1) },
        };
        Ok(GenerationOptions { caps: PropagationCaps { local_cap: self.local_cap, ..Default::default() }, input })
    }
}

impl DetectionArgs {
    fn config(&self, sampling: &Sampling, generation: GenerationOptions) -> DetectionConfig {
        DetectionConfig {
            k: self.k,
            tau: self.tau,
            delta: sampling.delta,
            epsilon: sampling.epsilon,
            seed: sampling.seed,
            threshold: self.threshold,
            executor: sampling.executor,
            dense_cap: sampling.dense_cap,
            family: FaultFamily::AllMissing,
            redraw_candidates: false,
            generation,
        }
    }
}

/// Writes the JSON document and the human summary according to `common`.
fn emit<T: Serialize>(common: &Common, doc: &T, summary: &str) -> Result<()> {
    let json = serde_json::to_string_pretty(doc)?;
    if let Some(path) = &common.out {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut stdout = std::io::stdout().lock();
    match common.format {
        Format::Json => {
            if common.out.is_none() {
                writeln!(stdout, "{json}")?;
            }
            eprintln!("{summary}");
        }
        Format::Text => writeln!(stdout, "{summary}")?,
    }
    Ok(())
}

fn pattern_summary(p: &TestPattern) -> String {
    format!(
        "site {} on wires {:?}: overlap r={:.4}, success {:.4}\n  input SPD: {} terms, nu*={:.4} nu={:.4}\n  measurement SPD: {} terms, nu={:.4} nu*={:.4}\n  optimal={} max active block={}",
        p.site,
        p.wires,
        p.r,
        p.p_success,
        p.spd_rho.len(),
        p.rho_norms.nu_star,
        p.rho_norms.nu,
        p.spd_m.len(),
        p.m_norms.nu,
        p.m_norms.nu_star,
        p.optimal,
        p.max_active_block(),
    )
}

#[derive(Serialize)]
struct SiteOutcome {
    site: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<TestPattern>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct BenchInfo {
    name: String,
    qubits: usize,
    gates: usize,
    size: usize,
    depth: usize,
    non_clifford: usize,
    hash: String,
}

#[derive(Serialize)]
struct DetectOutput {
    candidates: Vec<usize>,
    injected_site: Option<usize>,
    #[serde(flatten)]
    detection: detection::Detection,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { common, generation, site, fault } => {
            let (_, c) = load_circuit(&common.circuit)?;
            let fm = parse_fault(&fault)?;
            let p = atpg::generate_test_patterns(&c, site, &fm, &generation.options()?)?;
            emit(&common, &p, &pattern_summary(&p))
        }
        Command::GenAll { common, generation, fault } => {
            let (name, c) = load_circuit(&common.circuit)?;
            let fm = parse_fault(&fault)?;
            let sites: Vec<usize> = (0..c.len()).collect();
            let results = atpg::generate_all(&c, &sites, &fm, &generation.options()?);
            let ok: Vec<&TestPattern> = results.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
            let mean = |f: &dyn Fn(&TestPattern) -> f64| ok.iter().map(|p| f(p)).sum::<f64>() / ok.len().max(1) as f64;
            let summary = format!(
                "{name}: {} of {} sites generated; mean nu*(rho)={:.3}, mean nu(M)={:.3}, {} non-optimal",
                ok.len(),
                results.len(),
                mean(&|p| p.rho_norms.nu_star),
                mean(&|p| p.m_norms.nu),
                ok.iter().filter(|p| !p.optimal).count(),
            );
            let doc: Vec<SiteOutcome> = results
                .into_iter()
                .map(|(site, r)| match r {
                    Ok(p) => SiteOutcome { site, pattern: Some(p), error: None },
                    Err(e) => SiteOutcome { site, pattern: None, error: Some(e.to_string()) },
                })
                .collect();
            emit(&common, &doc, &summary)
        }
        Command::Apply { common, sampling, pattern, inject_site, fault } => {
            let (_, c) = load_circuit(&common.circuit)?;
            let text = fs::read_to_string(&pattern).with_context(|| format!("reading {}", pattern.display()))?;
            let p: TestPattern = serde_json::from_str(&text).with_context(|| format!("parsing {}", pattern.display()))?;
            if p.num_qubits != c.num_qubits() {
                bail!("pattern is for {} qubits but the circuit has {}", p.num_qubits, c.num_qubits());
            }
            let cut = match inject_site {
                Some(site) => inject_fault(&c, site, &parse_fault(&fault)?)?,
                None => c,
            };
            let executor = sampling.executor.build(sampling.dense_cap);
            let r = sampler::run_test_application(
                &p.spd_rho,
                &p.spd_m,
                &cut,
                executor.as_ref(),
                sampling.delta,
                sampling.epsilon,
                sampling.seed,
            )?;
            let summary = format!(
                "estimate {:.4} from {} trials ({} executor, {:.2}s); fault-free expectation {:.4}",
                r.estimate, r.trials, r.executor, r.wall_time_s, p.p_success
            );
            emit(&common, &r, &summary)
        }
        Command::Detect { common, generation, sampling, detection: args, inject_site, fault } => {
            let (_, c) = load_circuit(&common.circuit)?;
            let cfg = args.config(&sampling, generation.options()?);
            let candidates = detection::seeded_candidates(&c, &cfg)?;
            let patterns = detection::candidate_patterns(&c, &candidates, &cfg.generation)?;
            let cut = match inject_site {
                Some(site) => inject_fault(&c, site, &parse_fault(&fault)?)?,
                None => c,
            };
            let d = detection::detect(&cut, &patterns, &cfg, detection::sub_seed(cfg.seed, 3, 0))?;
            let summary = format!(
                "verdict: {} (min estimate {:.4}, threshold {})",
                if d.faulty { "faulty" } else { "fault-free" },
                d.min_estimate,
                cfg.threshold
            );
            let doc = DetectOutput { candidates: candidates.iter().map(|(s, _)| *s).collect(), injected_site: inject_site, detection: d };
            emit(&common, &doc, &summary)
        }
        Command::Experiment { common, generation, sampling, detection: args, trials, redraw } => {
            let (name, c) = load_circuit(&common.circuit)?;
            let cfg = DetectionConfig { redraw_candidates: redraw, ..args.config(&sampling, generation.options()?) };
            let report = detection::run_experiment(&name, &c, trials, &cfg)?;
            emit(&common, &report, &report.summary())
        }
        Command::BenchInfo { common } => {
            let (name, c) = load_circuit(&common.circuit)?;
            let info = BenchInfo {
                name,
                qubits: c.num_qubits(),
                gates: c.len(),
                size: c.size(),
                depth: c.depth(),
                non_clifford: c.non_clifford_count(),
                hash: c.content_hash(),
            };
            let summary = format!(
                "{}: {} qubits, {} gates ({} non-Clifford), depth {}",
                info.name, info.qubits, info.gates, info.non_clifford, info.depth
            );
            emit(&common, &info, &summary)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::classify(&e))
        }
    }
}
