//! Data-generation harness: a finite-horizon constrained linear-quadratic
//! control family whose instances are stacked into box-constrained QPs and
//! solved by an in-house operator-splitting method that counts iterations
//! and snapshots iterates.
//!
//! The pipeline is: draw an initial state from the sampling box
//! ([`sample_dataset`]), build the stacked QP ([`build_qp`]), solve it while
//! recording the iteration count ([`admm_solve`]), reject infeasible or
//! non-converged candidates, and optionally re-solve accepted instances
//! with iterate snapshots to trace a performance metric against the
//! high-accuracy solution ([`record_metrics`]).

use alloc::vec::Vec;
use core::fmt;

mod admm;
mod linalg;
mod metrics;
mod sample;

pub use admm::{admm_solve, reference_solution, SolveReport, SolveStatus, SolverSettings};
pub use linalg::Mat;
pub use metrics::{phi_metric, record_metrics, sample_metric_trace, MetricRow};
pub use sample::{
    acceptance_rate_too_low, config_digest, draw_initial_state, evaluate_candidate,
    sample_dataset, CandidateOutcome, Dataset, DatasetRecord,
};

/// Terminal constraint of the control family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Terminal {
    /// Terminal state pinned to the origin.
    #[default]
    Origin,
}

/// Two-state, one-input linear system with box constraints, solved over a
/// finite horizon with quadratic stage cost and a terminal equality.
#[derive(Clone, Debug, PartialEq)]
pub struct LtiMpcConfig {
    /// State transition matrix.
    pub a: [[f64; 2]; 2],
    /// Input matrix.
    pub b: [f64; 2],
    /// Prediction horizon `T`.
    pub horizon_t: usize,
    /// Infinity-norm bound on every predicted state.
    pub state_bound: f64,
    /// Infinity-norm bound on every input.
    pub input_bound: f64,
    /// Terminal constraint.
    pub terminal: Terminal,
    /// Per-coordinate closed sampling intervals for the initial state.
    pub sampling_box: [[f64; 2]; 2],
}

impl Default for LtiMpcConfig {
    fn default() -> Self {
        Self {
            a: [[1.5, 1.0], [0.0, 1.0]],
            b: [1.5, 1.0],
            horizon_t: 10,
            state_bound: 10.0,
            input_bound: 5.0,
            terminal: Terminal::Origin,
            sampling_box: [[-10.0, 10.0], [-10.0, 10.0]],
        }
    }
}

impl LtiMpcConfig {
    /// Decision-vector length `2(T+1) + T`.
    pub fn decision_len(&self) -> usize {
        3 * self.horizon_t + 2
    }

    /// Constraint-row count `2(T+1) + 2 + 3T`.
    pub fn constraint_rows(&self) -> usize {
        5 * self.horizon_t + 4
    }

    /// Validates bounds and horizon.
    pub fn validate(&self) -> Result<(), MpcError> {
        if self.horizon_t == 0 {
            return Err(MpcError::InvalidConfig { reason: "horizon must be >= 1" });
        }
        if !(self.state_bound > 0.0) || !(self.input_bound > 0.0) {
            return Err(MpcError::InvalidConfig { reason: "bounds must be positive" });
        }
        for c in &self.sampling_box {
            if !(c[0] < c[1]) || !c[0].is_finite() || !c[1].is_finite() {
                return Err(MpcError::InvalidConfig {
                    reason: "sampling box intervals must be finite and nonempty",
                });
            }
        }
        Ok(())
    }
}

/// Box-constrained QP `min 1/2 z'Pz + q'z  s.t.  l <= Cz <= u`
/// (equalities encoded as `l = u`).
#[derive(Clone, Debug, PartialEq)]
pub struct QpProblem {
    /// Symmetric positive-semidefinite cost matrix `P`.
    pub hessian: Mat,
    /// Linear cost `q`.
    pub linear_cost: Vec<f64>,
    /// Constraint matrix `C`.
    pub constraint_matrix: Mat,
    /// Row lower bounds.
    pub lower_bounds: Vec<f64>,
    /// Row upper bounds.
    pub upper_bounds: Vec<f64>,
}

impl QpProblem {
    /// Checks dimensional consistency, bound ordering and Hessian symmetry
    /// (to `1e-12`).
    pub fn validate(&self) -> Result<(), MpcError> {
        let n = self.hessian.nrows();
        if self.hessian.ncols() != n {
            return Err(MpcError::Malformed { reason: "hessian must be square" });
        }
        if self.linear_cost.len() != n || self.constraint_matrix.ncols() != n {
            return Err(MpcError::Malformed { reason: "cost/constraint width mismatch" });
        }
        let m = self.constraint_matrix.nrows();
        if self.lower_bounds.len() != m || self.upper_bounds.len() != m {
            return Err(MpcError::Malformed { reason: "bound length mismatch" });
        }
        if self.hessian.max_asymmetry() > 1e-12 {
            return Err(MpcError::Malformed { reason: "hessian asymmetric beyond 1e-12" });
        }
        for (l, u) in self.lower_bounds.iter().zip(&self.upper_bounds) {
            if !(l <= u) {
                return Err(MpcError::Malformed { reason: "lower bound above upper bound" });
            }
        }
        Ok(())
    }

    /// `1/2 z'Pz + q'z`.
    pub fn objective(&self, z: &[f64]) -> f64 {
        let mut pz = alloc::vec![0.0; z.len()];
        self.hessian.matvec(z, &mut pz);
        0.5 * linalg::dot(z, &pz) + linalg::dot(&self.linear_cost, z)
    }

    /// Worst constraint violation `max_i dist((Cz)_i, [l_i, u_i])`.
    pub fn constraint_violation(&self, z: &[f64]) -> f64 {
        let mut cz = alloc::vec![0.0; self.constraint_matrix.nrows()];
        self.constraint_matrix.matvec(z, &mut cz);
        let mut worst: f64 = 0.0;
        for (i, &v) in cz.iter().enumerate() {
            worst = worst.max(self.lower_bounds[i] - v).max(v - self.upper_bounds[i]);
        }
        worst.max(0.0)
    }
}

/// Errors from the harness.
#[derive(Clone, Debug, PartialEq)]
pub enum MpcError {
    /// Configuration failed validation.
    InvalidConfig {
        /// Human-readable reason.
        reason: &'static str,
    },
    /// Solver settings failed validation.
    InvalidSettings {
        /// Human-readable reason.
        reason: &'static str,
    },
    /// A QP failed structural validation.
    Malformed {
        /// Human-readable reason.
        reason: &'static str,
    },
    /// Decision vectors from different QP layouts.
    LayoutMismatch {
        /// Expected decision length.
        expected: usize,
        /// Actual lengths received.
        got: (usize, usize),
    },
    /// The instance is infeasible (or certified unbounded).
    Infeasible {
        /// Certificate status from the solver.
        status: SolveStatus,
    },
    /// The high-accuracy reference solve did not reach its tolerance.
    NotConverged,
    /// The KKT system could not be factored (degenerate regularization).
    FactorizationFailed,
    /// Rejection sampling aborted: acceptance rate below 1e-3 over 1e6
    /// candidates.
    AcceptanceRateTooLow {
        /// Candidates examined.
        examined: u64,
        /// Candidates accepted.
        accepted: u64,
    },
    /// An operation needing at least one element got none.
    EmptyInput {
        /// Which argument was empty.
        what: &'static str,
    },
}

impl fmt::Display for MpcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MpcError::InvalidConfig { reason } => write!(f, "invalid config: {reason}"),
            MpcError::InvalidSettings { reason } => write!(f, "invalid settings: {reason}"),
            MpcError::Malformed { reason } => write!(f, "malformed qp: {reason}"),
            MpcError::LayoutMismatch { expected, got } => write!(
                f,
                "decision vectors must both have length {expected}, got {} and {}",
                got.0, got.1
            ),
            MpcError::Infeasible { status } => write!(f, "instance rejected: {status:?}"),
            MpcError::NotConverged => write!(f, "reference solve did not converge"),
            MpcError::FactorizationFailed => write!(f, "kkt factorization failed"),
            MpcError::AcceptanceRateTooLow { examined, accepted } => write!(
                f,
                "acceptance rate {accepted}/{examined} fell below 1e-3; check config"
            ),
            MpcError::EmptyInput { what } => write!(f, "{what} must be nonempty"),
        }
    }
}

impl core::error::Error for MpcError {}

/// Builds the stacked QP for initial state `x0`.
///
/// Decision layout: predicted states `x_0..x_T` at coordinates `2i, 2i+1`,
/// inputs `u_0..u_{T-1}` after them. Cost `Σ_{i<T} (|x_i|² + |u_i|²)` (zero
/// terminal cost), equality rows for the initial state, the dynamics and
/// the terminal pin, box rows for states `x_0..x_{T-1}` and all inputs.
///
/// The builder performs no feasibility analysis: out-of-range `x0` still
/// builds, and infeasibility is the solver's verdict.
pub fn build_qp(config: &LtiMpcConfig, x0: [f64; 2]) -> Result<QpProblem, MpcError> {
    config.validate()?;
    let t = config.horizon_t;
    let n = config.decision_len();
    let m = config.constraint_rows();
    let xc = |i: usize, c: usize| 2 * i + c; // state coordinate
    let uc = |i: usize| 2 * (t + 1) + i; // input coordinate

    let mut hessian = Mat::zeros(n, n);
    for i in 0..t {
        *hessian.at_mut(xc(i, 0), xc(i, 0)) = 2.0;
        *hessian.at_mut(xc(i, 1), xc(i, 1)) = 2.0;
        *hessian.at_mut(uc(i), uc(i)) = 2.0;
    }

    let mut cm = Mat::zeros(m, n);
    let mut lower = alloc::vec![0.0; m];
    let mut upper = alloc::vec![0.0; m];
    let mut row = 0;

    // initial state
    for c in 0..2 {
        *cm.at_mut(row, xc(0, c)) = 1.0;
        lower[row] = x0[c];
        upper[row] = x0[c];
        row += 1;
    }
    // dynamics x_{i+1} - A x_i - B u_i = 0
    for i in 0..t {
        for c in 0..2 {
            *cm.at_mut(row, xc(i + 1, c)) = 1.0;
            *cm.at_mut(row, xc(i, 0)) = -config.a[c][0];
            *cm.at_mut(row, xc(i, 1)) = -config.a[c][1];
            *cm.at_mut(row, uc(i)) = -config.b[c];
            row += 1;
        }
    }
    // terminal pin x_T = 0
    for c in 0..2 {
        *cm.at_mut(row, xc(t, c)) = 1.0;
        row += 1;
    }
    // state boxes over stages 0..T-1
    for i in 0..t {
        for c in 0..2 {
            *cm.at_mut(row, xc(i, c)) = 1.0;
            lower[row] = -config.state_bound;
            upper[row] = config.state_bound;
            row += 1;
        }
    }
    // input boxes
    for i in 0..t {
        *cm.at_mut(row, uc(i)) = 1.0;
        lower[row] = -config.input_bound;
        upper[row] = config.input_bound;
        row += 1;
    }
    debug_assert_eq!(row, m);

    let qp = QpProblem {
        hessian,
        linear_cost: alloc::vec![0.0; n],
        constraint_matrix: cm,
        lower_bounds: lower,
        upper_bounds: upper,
    };
    debug_assert!(qp.validate().is_ok());
    Ok(qp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_matches_documented_family() {
        let c = LtiMpcConfig::default();
        assert_eq!(c.a, [[1.5, 1.0], [0.0, 1.0]]);
        assert_eq!(c.b, [1.5, 1.0]);
        assert_eq!(c.horizon_t, 10);
        assert_eq!(c.decision_len(), 32);
        assert_eq!(c.constraint_rows(), 54);
    }

    #[test]
    fn qp_row_structure() {
        let c = LtiMpcConfig::default();
        let qp = build_qp(&c, [1.0, -2.0]).unwrap();
        qp.validate().unwrap();
        let t = c.horizon_t;
        // 2(T+1) initial+dynamics rows, 2 terminal rows, 3T box rows
        assert_eq!(qp.constraint_matrix.nrows(), 2 * (t + 1) + 2 + 3 * t);
        assert_eq!(qp.lower_bounds[0], 1.0);
        assert_eq!(qp.upper_bounds[1], -2.0);
        // out-of-box x0 still builds
        assert!(build_qp(&c, [20.0, 0.0]).is_ok());
    }

    #[test]
    fn origin_instance_has_zero_optimum() {
        let c = LtiMpcConfig::default();
        let qp = build_qp(&c, [0.0, 0.0]).unwrap();
        let z = alloc::vec![0.0; c.decision_len()];
        assert_eq!(qp.objective(&z), 0.0);
        assert_eq!(qp.constraint_violation(&z), 0.0);
    }
}
