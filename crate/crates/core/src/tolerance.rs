//! Numerical tolerances shared by validation and solvers.

/// Tolerance record used by state validation and by the solvers.
///
/// `Tolerances::default()` carries the values every public function uses
/// unless a `_with` variant is given an explicit record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum deviation from Hermiticity, entrywise.
    pub hermitian: f64,
    /// Maximum `|Tr ρ − 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a density matrix.
    pub eigenvalue: f64,
    /// Slack on `rho14² ≤ rho11·rho44` and `rho23² ≤ rho22·rho33`.
    pub x_block: f64,
    /// Largest magnitude an entry outside the X pattern may have.
    pub x_pattern: f64,
    /// Slack on Bloch vector norms and correlation tensor entries.
    pub bloch_norm: f64,
    /// Fixed-point residual required of the analytic closest product state.
    pub stationarity: f64,
    /// Fixed-point residual required of the numerical closest product state.
    pub oracle_stationarity: f64,
    /// `|k1 − k3|` below which a state is flagged as lying on the case boundary.
    pub case_boundary: f64,
    /// Negative quantifier values down to `-clamp` are rounded to zero.
    pub clamp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            trace: 1e-12,
            eigenvalue: -1e-10,
            x_block: 1e-12,
            x_pattern: 1e-10,
            bloch_norm: 1e-10,
            stationarity: 1e-10,
            oracle_stationarity: 1e-8,
            case_boundary: 1e-10,
            clamp: 1e-12,
        }
    }
}
