//! L1-optimal SPDs over the full stabilizer-projector basis of at most three
//! qubits, and reweighted sparsification over an existing basis.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::{Spd, SpdError};
use crate::dense::{DenseOperator, C64};
use crate::lp::{self, SparseColumn};
use crate::numeric::TOL;
use crate::pauli::SignedPauli;
use crate::stabilizer::StabilizerProjector;

/// Largest register for which every stabilizer projector is enumerated.
pub const MAX_ENUMERATED_QUBITS: usize = 3;

/// Which norm (or lexicographic pair of norms) to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Nu,
    NuStar,
    /// `ν` first, then `ν*` among the `ν`-optimal decompositions.
    LexNuThenNuStar,
    /// `ν*` first, then `ν`.
    LexNuStarThenNu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    Unit,
    Trace,
}

impl Objective {
    fn stages(self) -> &'static [Weight] {
        match self {
            Objective::Nu => &[Weight::Unit],
            Objective::NuStar => &[Weight::Trace],
            Objective::LexNuThenNuStar => &[Weight::Unit, Weight::Trace],
            Objective::LexNuStarThenNu => &[Weight::Trace, Weight::Unit],
        }
    }
}

/// How lexicographic objectives are solved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LexMethod {
    /// Sequential stages restricted to the previous optimal face.
    #[default]
    Exact,
    /// One solve of `primary + ε·secondary`; `ε` is halved (at most ten
    /// times) until the primary value matches the unperturbed optimum.
    Perturbation { epsilon: f64 },
}

fn weights(w: Weight, projectors: &[StabilizerProjector]) -> Vec<f64> {
    match w {
        Weight::Unit => vec![1.0; projectors.len()],
        Weight::Trace => projectors.iter().map(|p| p.trace()).collect(),
    }
}

static ENUMERATED: [OnceLock<Vec<StabilizerProjector>>; MAX_ENUMERATED_QUBITS + 1] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// Every stabilizer projector on `n ≤ 3` qubits, identity first, ordered by
/// generator count. Computed once per `n`.
pub fn enumerate_projectors(n: usize) -> Result<&'static [StabilizerProjector], SpdError> {
    if n > MAX_ENUMERATED_QUBITS {
        return Err(SpdError::TooManyQubits(n));
    }
    Ok(ENUMERATED[n].get_or_init(|| build_projectors(n)))
}

fn build_projectors(n: usize) -> Vec<StabilizerProjector> {
    let paulis: Vec<SignedPauli> = (1..1u64 << (2 * n))
        .flat_map(|i| {
            let p = SignedPauli::from_index(n, i);
            [p.clone(), p.negated()]
        })
        .collect();
    let mut seen: std::collections::HashSet<StabilizerProjector> = std::collections::HashSet::new();
    let mut all = vec![StabilizerProjector::identity(n)];
    seen.insert(all[0].clone());
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for group in &frontier {
            for p in &paulis {
                if !group.generators().iter().all(|g| g.commutes(p)) || group.membership_sign(p).is_some() {
                    continue;
                }
                let mut gens = group.generators().to_vec();
                gens.push(p.clone());
                let bigger = StabilizerProjector::canonicalize(n, &gens).expect("commuting, sign-consistent");
                if seen.insert(bigger.clone()) {
                    next.push(bigger);
                }
            }
        }
        next.sort();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// `b_i = tr(P_i A) / 2^n` for every Pauli `P_i` in index order.
pub fn pauli_coefficients(a: &DenseOperator) -> Vec<f64> {
    let n = a.num_qubits();
    let d = a.dim();
    (0..1u64 << (2 * n))
        .map(|i| {
            let p = SignedPauli::from_index(n, i);
            let mut tr = C64::new(0.0, 0.0);
            for j in 0..d {
                let (row, amp) = crate::dense::pauli_action(&p, j);
                tr += amp * a.get(j, row);
            }
            tr.re / d as f64
        })
        .collect()
}

/// Column of a projector in the normalized Pauli basis: `±2^{-k}` on each
/// group element.
fn projector_column(p: &StabilizerProjector, row_of: &dyn Fn(&SignedPauli) -> Option<usize>) -> Option<SparseColumn> {
    let scale = 0.5f64.powi(p.num_generators() as i32);
    p.elements()
        .iter()
        .map(|e| row_of(e).map(|r| (r, if e.is_negative() { -scale } else { scale })))
        .collect()
}

fn solve_columns(
    num_rows: usize,
    columns: &[SparseColumn],
    b: &[f64],
    projectors: &[StabilizerProjector],
    stage_weights: &[Vec<f64>],
    method: LexMethod,
) -> Result<Vec<f64>, SpdError> {
    match method {
        LexMethod::Exact => Ok(lp::solve_l1(num_rows, columns, b, stage_weights)?.x),
        LexMethod::Perturbation { epsilon } => {
            if stage_weights.len() == 1 {
                return Ok(lp::solve_l1(num_rows, columns, b, stage_weights)?.x);
            }
            let reference = lp::solve_l1(num_rows, columns, b, &stage_weights[..1])?.values[0];
            let mut eps = epsilon;
            let mut last = None;
            for _ in 0..=10 {
                let combined: Vec<f64> = (0..projectors.len())
                    .map(|j| {
                        stage_weights.iter().enumerate().map(|(k, w)| w[j] * eps.powi(k as i32)).sum::<f64>()
                    })
                    .collect();
                let sol = lp::solve_l1(num_rows, columns, b, &[combined])?;
                let primary: f64 = stage_weights[0].iter().zip(&sol.x).map(|(w, x)| w * x.abs()).sum();
                if (primary - reference).abs() <= TOL.optimizer {
                    return Ok(sol.x);
                }
                last = Some(sol.x);
                eps *= 0.5;
            }
            Ok(last.expect("at least one perturbed solve"))
        }
    }
}

/// Optimal SPD of the operator with normalized Pauli coefficients `b`
/// (see [`pauli_coefficients`]) over all projectors on `n ≤ 3` qubits.
pub fn optimal_spd_from_coefficients(
    n: usize,
    b: &[f64],
    objective: Objective,
    method: LexMethod,
) -> Result<Spd, SpdError> {
    let projectors = enumerate_projectors(n)?;
    let num_rows = 1usize << (2 * n);
    let row_of = |e: &SignedPauli| Some(e.to_index() as usize);
    let columns: Vec<SparseColumn> =
        projectors.iter().map(|p| projector_column(p, &row_of).expect("all rows present")).collect();
    let stage_weights: Vec<Vec<f64>> = objective.stages().iter().map(|&w| weights(w, projectors)).collect();
    let x = solve_columns(num_rows, &columns, b, projectors, &stage_weights, method)?;
    Ok(Spd::from_terms(n, x.into_iter().zip(projectors.iter().cloned()).filter(|(c, _)| c.abs() > TOL.coeff_drop)))
}

/// Optimal SPD of any Hermitian operator on at most three qubits; the
/// reconstruction is verified densely.
pub fn optimal_spd_for(a: &DenseOperator, objective: Objective, method: LexMethod) -> Result<Spd, SpdError> {
    let n = a.num_qubits();
    if n > MAX_ENUMERATED_QUBITS {
        return Err(SpdError::TooManyQubits(n));
    }
    if !a.is_hermitian(TOL.atol) {
        return Err(SpdError::NotHermitian);
    }
    let spd = optimal_spd_from_coefficients(n, &pauli_coefficients(a), objective, method)?;
    let err = spd.reconstruct()?.max_abs_diff(a);
    if err > 1e-7 {
        return Err(SpdError::Reconstruction(err));
    }
    Ok(spd)
}

/// Optimal SPD of an operator `0 ⊑ A ⊑ I` on at most three qubits.
pub fn optimal_spd(a: &DenseOperator, objective: Objective) -> Result<Spd, SpdError> {
    if !a.is_hermitian(TOL.atol) {
        return Err(SpdError::NotHermitian);
    }
    let (vals, _) = a.hermitian_eigen();
    let (min, max) = (vals[0], vals[vals.len() - 1]);
    if min < -TOL.optimizer || max > 1.0 + TOL.optimizer {
        return Err(SpdError::OutOfRange { min, max });
    }
    optimal_spd_for(a, objective, LexMethod::Exact)
}

/// Parameters of the reweighted-L1 sparsifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifyOptions {
    /// Primary and secondary objectives, kept optimal over the restricted basis.
    pub objective: Objective,
    /// Offset in the reweighting `L_i = 1/(γ + |x_i|)`.
    pub gamma: f64,
    pub iterations: usize,
    /// Skip when the projectors' groups touch more distinct Paulis than this.
    pub row_cap: usize,
}

impl Default for SparsifyOptions {
    fn default() -> Self {
        SparsifyOptions { objective: Objective::LexNuThenNuStar, gamma: 1e-6, iterations: 5, row_cap: 4096 }
    }
}

/// Re-solves over the projectors already present in `s`, keeping the
/// objective optimal on that basis and then favouring few terms.
///
/// The represented operator is unchanged. Returns `s` unchanged when the
/// constraint system would exceed `row_cap` rows.
pub fn sparsify(s: &Spd, opts: &SparsifyOptions) -> Result<Spd, SpdError> {
    if s.len() <= 1 {
        return Ok(s.clone());
    }
    let projectors: Vec<StabilizerProjector> = s.terms().iter().map(|t| t.proj.clone()).collect();
    let total_elements: usize = projectors.iter().map(|p| 1usize << p.num_generators()).sum();
    let mut rows: HashMap<SignedPauli, usize> = HashMap::new();
    for p in &projectors {
        if p.num_generators() > 20 || total_elements > opts.row_cap * 16 {
            return Ok(s.clone());
        }
        for e in p.elements() {
            let len = rows.len();
            rows.entry(e.unsigned()).or_insert(len);
            if rows.len() > opts.row_cap {
                return Ok(s.clone());
            }
        }
    }
    let row_of = |e: &SignedPauli| rows.get(&e.unsigned()).copied();
    let columns: Vec<SparseColumn> =
        projectors.iter().map(|p| projector_column(p, &row_of).expect("rows cover all elements")).collect();
    let mut b = vec![0.0; rows.len()];
    for (t, col) in s.terms().iter().zip(&columns) {
        for &(r, v) in col {
            b[r] += t.coeff * v;
        }
    }
    let mut stage_weights: Vec<Vec<f64>> = opts.objective.stages().iter().map(|&w| weights(w, &projectors)).collect();
    let mut x: Vec<f64> = s.terms().iter().map(|t| t.coeff).collect();
    for _ in 0..opts.iterations {
        let reweight: Vec<f64> = x.iter().map(|v| 1.0 / (opts.gamma + v.abs())).collect();
        stage_weights.truncate(opts.objective.stages().len());
        stage_weights.push(reweight);
        x = lp::solve_l1(rows.len(), &columns, &b, &stage_weights)?.x;
    }
    Ok(Spd::from_terms(s.num_qubits(), x.into_iter().zip(projectors).filter(|(c, _)| c.abs() > TOL.coeff_drop)))
}
