//! Central numeric policy.

/// Tolerances and size caps shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Generic comparison tolerance.
    pub atol: f64,
    /// Tolerance for checks against optimizer output.
    pub optimizer: f64,
    /// Allowed deviation of `U†U` from the identity.
    pub unitarity: f64,
    /// Distance under which two unit-circle eigenvalues are treated as equal.
    pub eigen_cluster: f64,
    /// Coefficients with smaller magnitude are dropped from decompositions.
    pub coeff_drop: f64,
    /// Largest qubit count simulated densely.
    pub dense_cap: usize,
    /// Largest active block solved exactly by the LP.
    pub local_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}

pub const TOL: Tolerances = Tolerances {
    atol: 1e-9,
    optimizer: 1e-6,
    unitarity: 1e-8,
    eigen_cluster: 1e-7,
    coeff_drop: 1e-11,
    dense_cap: 12,
    local_cap: 3,
};
