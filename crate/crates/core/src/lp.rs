//! Weighted L1 minimization `min Σ w_j |x_j|  s.t.  M x = b` on the split
//! `x = u − v`, `u, v ≥ 0`, solved with `microlp`.
//!
//! Several weight vectors may be given; they are optimized lexicographically.
//! Each later stage keeps every earlier objective within a small relative
//! slack of its optimum.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraints are infeasible")]
    Infeasible,
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("LP solver failed: {0}")]
    Solver(String),
    #[error("no objective given")]
    NoObjective,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl From<microlp::Error> for LpError {
    fn from(e: microlp::Error) -> Self {
        match e {
            microlp::Error::Infeasible => LpError::Infeasible,
            microlp::Error::Unbounded => LpError::Unbounded,
            other => LpError::Solver(other.to_string()),
        }
    }
}

/// Sparse column `(row, value)`.
pub type SparseColumn = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct L1Solution {
    pub x: Vec<f64>,
    /// Value of each objective at the returned point.
    pub values: Vec<f64>,
}

/// Relative slack granted to earlier stages of a lexicographic solve.
const STAGE_SLACK: f64 = 1e-7;

fn stage_value(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(wi, xi)| wi * xi.abs()).sum()
}

fn solve_stage(
    num_rows: usize,
    columns: &[SparseColumn],
    b: &[f64],
    cost: &[f64],
    bounds: &[(&[f64], f64)],
) -> Result<Vec<f64>, LpError> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let pos: Vec<Variable> = cost.iter().map(|&w| problem.add_var(w, (0.0, f64::INFINITY))).collect();
    let neg: Vec<Variable> = cost.iter().map(|&w| problem.add_var(w, (0.0, f64::INFINITY))).collect();
    let mut rows: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); num_rows];
    for (j, col) in columns.iter().enumerate() {
        for &(r, v) in col {
            rows[r].push((pos[j], v));
            rows[r].push((neg[j], -v));
        }
    }
    for (row, &rhs) in rows.iter().zip(b) {
        if row.is_empty() {
            if rhs.abs() > 1e-12 {
                return Err(LpError::Infeasible);
            }
            continue;
        }
        problem.add_constraint(row.as_slice(), ComparisonOp::Eq, rhs);
    }
    for &(w, value) in bounds {
        let expr: Vec<(Variable, f64)> =
            w.iter().enumerate().flat_map(|(j, &wj)| [(pos[j], wj), (neg[j], wj)]).filter(|&(_, c)| c != 0.0).collect();
        problem.add_constraint(expr.as_slice(), ComparisonOp::Le, value * (1.0 + STAGE_SLACK) + 1e-9);
    }
    let solution = problem.solve()?.into_solution().map_err(|e| LpError::Solver(format!("{e:?}")))?;
    Ok(pos.iter().zip(&neg).map(|(&u, &v)| solution.var_value(u) - solution.var_value(v)).collect())
}

/// Lexicographic weighted L1 minimization over columns of `M`.
///
/// `objectives[k][j]` is the weight of `|x_j|` in stage `k`; all weights must
/// be nonnegative.
pub fn solve_l1(
    num_rows: usize,
    columns: &[SparseColumn],
    b: &[f64],
    objectives: &[Vec<f64>],
) -> Result<L1Solution, LpError> {
    if objectives.is_empty() {
        return Err(LpError::NoObjective);
    }
    if b.len() != num_rows {
        return Err(LpError::Dimension(format!("rhs has {} entries for {} rows", b.len(), num_rows)));
    }
    let n = columns.len();
    for w in objectives {
        if w.len() != n {
            return Err(LpError::Dimension(format!("objective has {} weights for {} columns", w.len(), n)));
        }
    }
    if let Some(&(r, _)) = columns.iter().flatten().find(|(r, _)| *r >= num_rows) {
        return Err(LpError::Dimension(format!("row {r} out of range for {num_rows} rows")));
    }
    let mut bounds: Vec<(&[f64], f64)> = Vec::with_capacity(objectives.len());
    let mut x = Vec::new();
    for (k, w) in objectives.iter().enumerate() {
        match solve_stage(num_rows, columns, b, w, &bounds) {
            Ok(next) => x = next,
            // A later stage only refines the tie-break; keep the earlier optimum
            // if the solver rejects the tightened problem.
            Err(LpError::Infeasible | LpError::Solver(_)) if k > 0 => break,
            Err(e) => return Err(e),
        }
        bounds.push((w.as_slice(), stage_value(w, &x)));
    }
    let values = objectives.iter().map(|w| stage_value(w, &x)).collect();
    Ok(L1Solution { x, values })
}
