//! Exact solution of the scalar robust and relaxed scenario programs over
//! recorded sample values, plus the sweeps behind the trade-off curves.
//!
//! The robust program picks the smallest `y` covering every value, i.e. the
//! maximum. The relaxed program minimizes
//!
//! ```text
//! f(y) = y + rho * Σ max{0, v_i - y}      over y >= 0,
//! ```
//!
//! a piecewise-linear convex function whose minimizer set is an interval
//! with endpoints in `{0} ∪ {v_i}`. We return the *smallest* minimizer
//! (documented tie-break: it yields the tightest certified budget for a
//! given cost). A value is counted as violated only when its slack is
//! strictly positive, so samples sitting exactly at `y*` are covered.

use alloc::vec::Vec;
use core::fmt;

use crate::bounds::{
    self, BoundQuery, BoundsError, EpsilonInterval, EpsilonResult, RootConfig,
};

/// Recorded nonnegative sample values with parallel identifiers.
///
/// Values are iteration counts or performance-metric readings; identifiers
/// follow the samples through sweeps and serialized output.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleValues {
    values: Vec<f64>,
    sample_ids: Vec<u64>,
}

impl SampleValues {
    /// Builds a validated sample set: nonempty, finite, nonnegative values
    /// and one identifier per value.
    pub fn new(values: Vec<f64>, sample_ids: Vec<u64>) -> Result<Self, ScenarioError> {
        if values.is_empty() {
            return Err(ScenarioError::EmptyInput);
        }
        if values.len() != sample_ids.len() {
            return Err(ScenarioError::LengthMismatch {
                values: values.len(),
                ids: sample_ids.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(ScenarioError::InvalidValue { index: i, value: v });
            }
        }
        Ok(Self { values, sample_ids })
    }

    /// Sample set with identifiers `0..n`.
    pub fn from_values(values: Vec<f64>) -> Result<Self, ScenarioError> {
        let ids = (0..values.len() as u64).collect();
        Self::new(values, ids)
    }

    /// Recorded values, in input order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Identifiers parallel to [`Self::values`].
    pub fn sample_ids(&self) -> &[u64] {
        &self.sample_ids
    }

    /// Number of samples `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API completeness.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Solution of the robust program: the worst recorded value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobustSolution {
    /// Learned bound `y* = max_i v_i`.
    pub y_star: f64,
    /// Identifier of the attaining sample (smallest id on ties).
    pub argmax_id: u64,
}

/// Solution of the relaxed program at weight `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedSolution {
    /// Smallest minimizer of the penalized objective.
    pub y_star: f64,
    /// Relaxation weight the program was solved with.
    pub rho: f64,
    /// Slacks `max{0, v_i - y*}`, in input order.
    pub xi_star: Vec<f64>,
    /// Number of strictly violated samples `|{i : xi_i > 0}|`.
    pub q_star: usize,
    /// Complexity `s* = 1 + q*`.
    pub s_star: usize,
    /// Objective value `y* + rho * Σ xi_i`.
    pub objective: f64,
}

/// One point of a trade-off sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffPoint {
    /// Sweep control: `rho`, iteration budget `n_a`, or iteration count `k`.
    pub control: f64,
    /// Learned decision at this control (`y*`, or the budget itself).
    pub y_value: f64,
    /// Violated-sample count at this point.
    pub q_star: usize,
    /// Complexity `1 + q*` where the a-posteriori bound applies.
    pub s_star: Option<usize>,
    /// Certified violation-probability bound.
    pub epsilon: f64,
    /// Lower risk bound, when a two-sided family was used.
    pub epsilon_lower: Option<f64>,
    /// Fraction of training values strictly above `y_value`.
    pub empirical_violation: f64,
}

/// Exact-duplicate diagnostics over a sample set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TieDiagnostics {
    /// Number of distinct values.
    pub distinct_count: usize,
    /// Largest multiplicity of any single value.
    pub max_multiplicity: usize,
    /// Fraction of samples sharing their value with at least one other.
    pub duplicated_mass: f64,
}

/// Which bound family certifies a relaxed solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundChoice {
    /// One-sided a-posteriori bound (no regularity assumption).
    Posteriori,
    /// Two-sided bound; meaningful for continuous-valued samples only.
    Interval,
}

/// Certificate attached to a relaxed solution.
#[derive(Clone, Debug, PartialEq)]
pub enum CertifiedBound {
    /// One-sided bound `ε(s*)`.
    Point(EpsilonResult),
    /// Two-sided bound `[ε̲(s*), ε̄(s*)]`.
    Interval {
        /// The solved (or fallback) interval.
        interval: EpsilonInterval,
        /// Set when the samples carry exact duplicates, in which case the
        /// lower bound rests on an assumption the data visibly violates
        /// (the one-sided reading stays valid).
        accumulation_warning: bool,
        /// Set when the interval equation had no bracketable root and the
        /// vacuous `[0, 1]` interval was substituted.
        degenerate_fallback: bool,
    },
}

/// Relaxed solution together with its certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedCertificate {
    /// Solution of the relaxed program.
    pub solution: RelaxedSolution,
    /// Risk bound evaluated at `q = s*`.
    pub bound: CertifiedBound,
}

/// Errors from the scenario operations.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioError {
    /// No samples supplied.
    EmptyInput,
    /// `values` and `sample_ids` lengths differ.
    LengthMismatch {
        /// Length of the value list.
        values: usize,
        /// Length of the id list.
        ids: usize,
    },
    /// A value was negative, NaN or infinite.
    InvalidValue {
        /// Index of the offending value.
        index: usize,
        /// The offending value.
        value: f64,
    },
    /// `rho` must be strictly positive and finite.
    InvalidRho {
        /// The offending weight.
        rho: f64,
    },
    /// A target violation count of zero requests the robust program.
    ZeroTarget,
    /// Empty target or grid list for a sweep.
    EmptySweep,
    /// A sweep grid entry was negative or non-finite.
    InvalidGridEntry {
        /// Index of the offending entry.
        index: usize,
        /// The offending entry.
        value: f64,
    },
    /// Error propagated from the bound inversion.
    Bounds(BoundsError),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::EmptyInput => write!(f, "sample set must be nonempty"),
            ScenarioError::LengthMismatch { values, ids } => {
                write!(f, "{values} values but {ids} sample ids")
            }
            ScenarioError::InvalidValue { index, value } => {
                write!(f, "value at index {index} must be finite and >= 0, got {value}")
            }
            ScenarioError::InvalidRho { rho } => {
                write!(f, "rho must be strictly positive and finite, got {rho}")
            }
            ScenarioError::ZeroTarget => {
                write!(f, "target violation count must be >= 1 (use the robust program)")
            }
            ScenarioError::EmptySweep => write!(f, "sweep requires a nonempty control list"),
            ScenarioError::InvalidGridEntry { index, value } => {
                write!(f, "grid entry at index {index} must be finite and >= 0, got {value}")
            }
            ScenarioError::Bounds(e) => write!(f, "bound inversion failed: {e}"),
        }
    }
}

impl core::error::Error for ScenarioError {}

impl From<BoundsError> for ScenarioError {
    fn from(e: BoundsError) -> Self {
        ScenarioError::Bounds(e)
    }
}

/// Solves the robust program: `y* = max_i v_i`, ties resolved toward the
/// smallest sample id.
pub fn solve_robust(samples: &SampleValues) -> RobustSolution {
    let mut y_star = f64::NEG_INFINITY;
    let mut argmax_id = u64::MAX;
    for (&v, &id) in samples.values.iter().zip(&samples.sample_ids) {
        if v > y_star || (v == y_star && id < argmax_id) {
            y_star = v;
            argmax_id = id;
        }
    }
    RobustSolution { y_star, argmax_id }
}

/// Solves the relaxed program for the smallest minimizer of
/// `y + rho * Σ max{0, v_i - y}` over `y >= 0`.
///
/// The minimizer is located among `{0} ∪ {v_i}` by walking the candidates
/// in ascending order until the right derivative `1 - rho * |{v_i > y}|`
/// turns nonnegative; sorting dominates at `O(N log N)`.
pub fn solve_relaxed(samples: &SampleValues, rho: f64) -> Result<RelaxedSolution, ScenarioError> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(ScenarioError::InvalidRho { rho });
    }
    let mut sorted = samples.values.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();

    // count of values strictly greater than `y`, from the sorted order
    let count_greater = |y: f64| n - sorted.partition_point(|&v| v <= y);

    let mut y_star = 0.0;
    if 1.0 - rho * count_greater(0.0) as f64 >= 0.0 {
        // Nondecreasing from the boundary: smallest minimizer is 0.
    } else {
        let mut idx = 0;
        loop {
            // next distinct candidate value
            let c = sorted[idx];
            let greater = n - sorted.partition_point(|&v| v <= c);
            if 1.0 - rho * greater as f64 >= 0.0 {
                y_star = c;
                break;
            }
            idx = n - greater; // first index past the run of `c`
            debug_assert!(idx < n, "derivative is nonnegative at the maximum");
        }
    }

    let xi_star: Vec<f64> =
        samples.values.iter().map(|&v| (v - y_star).max(0.0)).collect();
    let q_star = xi_star.iter().filter(|&&x| x > 0.0).count();
    let objective = y_star + rho * xi_star.iter().sum::<f64>();
    Ok(RelaxedSolution { y_star, rho, xi_star, q_star, s_star: 1 + q_star, objective })
}

/// Relaxation weight from a target violation count: `rho = 1 / q̂`.
pub fn rho_from_target(q_hat: u64) -> Result<f64, ScenarioError> {
    if q_hat == 0 {
        return Err(ScenarioError::ZeroTarget);
    }
    Ok(1.0 / q_hat as f64)
}

/// Robust solution paired with the scalar-decision binomial bound.
pub fn certify_robust(
    samples: &SampleValues,
    beta: f64,
) -> Result<(RobustSolution, EpsilonResult), ScenarioError> {
    let solution = solve_robust(samples);
    let eps = bounds::binomial_epsilon(&BoundQuery::with_dimension(samples.len(), beta, 1))?;
    Ok((solution, eps))
}

/// Relaxed solution paired with the chosen bound family evaluated at
/// `q = s*`.
///
/// In `Interval` mode the result carries an accumulation warning whenever
/// the samples contain exact duplicates, and falls back to the vacuous
/// `[0, 1]` interval if the two-root equation cannot be bracketed.
pub fn certify_relaxed(
    samples: &SampleValues,
    rho: f64,
    beta: f64,
    choice: BoundChoice,
) -> Result<RelaxedCertificate, ScenarioError> {
    let solution = solve_relaxed(samples, rho)?;
    let query = BoundQuery::with_complexity(samples.len(), beta, solution.s_star);
    let bound = match choice {
        BoundChoice::Posteriori => CertifiedBound::Point(bounds::epsilon_posteriori(&query)?),
        BoundChoice::Interval => {
            let accumulation_warning = tie_diagnostics(samples).duplicated_mass > 0.0;
            match bounds::epsilon_interval(&query) {
                Ok(interval) => CertifiedBound::Interval {
                    interval,
                    accumulation_warning,
                    degenerate_fallback: false,
                },
                Err(BoundsError::BracketFailure { .. }) => CertifiedBound::Interval {
                    interval: EpsilonInterval {
                        epsilon_lower: 0.0,
                        epsilon_upper: 1.0,
                        root_t_lower: 0.0,
                        root_t_upper: 1.0,
                        residual_lower: 0.0,
                        residual_upper: 0.0,
                    },
                    accumulation_warning,
                    degenerate_fallback: true,
                },
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(RelaxedCertificate { solution, bound })
}

/// Sweeps the relaxed program over target violation counts; one point per
/// target at `rho = 1/q̂`, certified with the a-posteriori bound, sorted by
/// `rho` ascending.
pub fn sweep_rho(
    samples: &SampleValues,
    targets: &[u64],
    beta: f64,
) -> Result<Vec<TradeoffPoint>, ScenarioError> {
    if targets.is_empty() {
        return Err(ScenarioError::EmptySweep);
    }
    let mut points = Vec::with_capacity(targets.len());
    for &q_hat in targets {
        let rho = rho_from_target(q_hat)?;
        let cert = certify_relaxed(samples, rho, beta, BoundChoice::Posteriori)?;
        let epsilon = match &cert.bound {
            CertifiedBound::Point(e) => e.epsilon,
            CertifiedBound::Interval { .. } => unreachable!("posteriori certificate requested"),
        };
        points.push(TradeoffPoint {
            control: rho,
            y_value: cert.solution.y_star,
            q_star: cert.solution.q_star,
            s_star: Some(cert.solution.s_star),
            epsilon,
            epsilon_lower: None,
            empirical_violation: empirical_violation(samples, cert.solution.y_star),
        });
    }
    points.sort_by(|a, b| a.control.total_cmp(&b.control));
    Ok(points)
}

/// Sweeps fixed iteration budgets with the test-set bound, splitting the
/// total confidence uniformly over the grid (`β' = β_total / |grid|`).
pub fn sweep_budget(
    samples: &SampleValues,
    grid: &[f64],
    beta_total: f64,
) -> Result<Vec<TradeoffPoint>, ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::EmptySweep);
    }
    for (i, &g) in grid.iter().enumerate() {
        if !g.is_finite() || g < 0.0 {
            return Err(ScenarioError::InvalidGridEntry { index: i, value: g });
        }
    }
    let beta_split = beta_total / grid.len() as f64;
    let n = samples.len();
    let mut points = Vec::with_capacity(grid.len());
    for &budget in grid {
        let violations = samples.values.iter().filter(|&&v| v > budget).count();
        let eps = bounds::testset_epsilon(n, beta_split, violations)?;
        points.push(TradeoffPoint {
            control: budget,
            y_value: budget,
            q_star: violations,
            s_star: None,
            epsilon: eps.epsilon,
            epsilon_lower: None,
            empirical_violation: violations as f64 / n as f64,
        });
    }
    points.sort_by(|a, b| a.control.total_cmp(&b.control));
    Ok(points)
}

/// Fraction of samples with value strictly above `y`.
pub fn empirical_violation(samples: &SampleValues, y: f64) -> f64 {
    let above = samples.values.iter().filter(|&&v| v > y).count();
    above as f64 / samples.len() as f64
}

/// Counts exact-value duplicates.
pub fn tie_diagnostics(samples: &SampleValues) -> TieDiagnostics {
    let mut sorted = samples.values.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut distinct_count = 0;
    let mut max_multiplicity = 0;
    let mut duplicated = 0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let mult = j - i;
        distinct_count += 1;
        max_multiplicity = max_multiplicity.max(mult);
        if mult > 1 {
            duplicated += mult;
        }
        i = j;
    }
    TieDiagnostics {
        distinct_count,
        max_multiplicity,
        duplicated_mass: duplicated as f64 / sorted.len() as f64,
    }
}

/// Re-exported so callers tuning the root finder can thread it through
/// without importing `bounds` directly.
pub type ScenarioRootConfig = RootConfig;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn samples(values: &[f64]) -> SampleValues {
        SampleValues::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn robust_is_the_maximum() {
        let s = samples(&[3.0, 9.0, 5.0]);
        let r = solve_robust(&s);
        assert_eq!(r.y_star, 9.0);
        assert_eq!(r.argmax_id, 1);

        let s = samples(&[0.0]);
        assert_eq!(solve_robust(&s).y_star, 0.0);
    }

    #[test]
    fn robust_tie_breaks_to_smallest_id() {
        let s = SampleValues::new(vec![7.0, 7.0, 1.0], vec![5, 2, 9]).unwrap();
        assert_eq!(solve_robust(&s).argmax_id, 2);
    }

    #[test]
    fn relaxed_worked_example() {
        let s = samples(&[3.0, 5.0, 5.0, 9.0]);
        let r = solve_relaxed(&s, 0.5).unwrap();
        assert_eq!(r.y_star, 5.0);
        assert_eq!(r.q_star, 1);
        assert_eq!(r.s_star, 2);
        assert_eq!(r.objective, 7.0);
        assert_eq!(r.xi_star, vec![0.0, 0.0, 0.0, 4.0]);
    }

    #[test]
    fn relaxed_flat_optimum_takes_smallest_minimizer() {
        let s = samples(&[2.0, 7.0]);
        let r = solve_relaxed(&s, 1.0).unwrap();
        assert_eq!(r.y_star, 2.0);
        assert_eq!(r.q_star, 1);
        assert_eq!(r.objective, 7.0);
    }

    #[test]
    fn relaxed_recovers_robust_for_large_rho() {
        let s = samples(&[4.0, 1.0, 6.0, 6.0]);
        let r = solve_relaxed(&s, 2.0).unwrap();
        assert_eq!(r.y_star, 6.0);
        assert_eq!(r.q_star, 0);
    }

    #[test]
    fn relaxed_boundary_optimum_for_small_rho() {
        let s = samples(&[4.0, 6.0, 8.0]);
        let r = solve_relaxed(&s, 0.1).unwrap();
        assert_eq!(r.y_star, 0.0);
        assert_eq!(r.q_star, 3);
        assert_eq!(r.s_star, 4);
    }

    #[test]
    fn rho_from_target_examples() {
        assert_eq!(rho_from_target(500).unwrap(), 0.002);
        assert_eq!(rho_from_target(1).unwrap(), 1.0);
        assert_eq!(rho_from_target(4).unwrap(), 0.25);
        assert!(matches!(rho_from_target(0), Err(ScenarioError::ZeroTarget)));
    }

    #[test]
    fn empirical_violation_is_strict() {
        let s = samples(&[1.0, 2.0, 3.0]);
        assert_eq!(empirical_violation(&s, 2.0), 1.0 / 3.0);
        assert_eq!(empirical_violation(&s, 3.0), 0.0);
        assert_eq!(empirical_violation(&s, 0.5), 1.0);
    }

    #[test]
    fn tie_diagnostics_examples() {
        let d = tie_diagnostics(&samples(&[5.0, 5.0, 5.0]));
        assert_eq!((d.distinct_count, d.max_multiplicity), (1, 3));
        assert_eq!(d.duplicated_mass, 1.0);

        let d = tie_diagnostics(&samples(&[1.0, 2.0, 3.0]));
        assert_eq!((d.distinct_count, d.max_multiplicity), (3, 1));
        assert_eq!(d.duplicated_mass, 0.0);

        let d = tie_diagnostics(&samples(&[1.0, 1.0, 2.0, 3.0]));
        assert_eq!(d.duplicated_mass, 0.5);
    }

    #[test]
    fn certify_relaxed_composes_bound_at_s_star() {
        let s = samples(&[3.0, 5.0, 5.0, 9.0]);
        let cert = certify_relaxed(&s, 0.5, 0.05, BoundChoice::Posteriori).unwrap();
        assert_eq!(cert.solution.s_star, 2);
        let direct =
            bounds::epsilon_posteriori(&BoundQuery::with_complexity(4, 0.05, 2)).unwrap();
        match cert.bound {
            CertifiedBound::Point(e) => assert_eq!(e.epsilon, direct.epsilon),
            _ => panic!("expected point bound"),
        }
    }

    #[test]
    fn certify_relaxed_interval_warns_on_ties() {
        let s = samples(&[3.0, 5.0, 5.0, 9.0]);
        let cert = certify_relaxed(&s, 0.5, 0.05, BoundChoice::Interval).unwrap();
        match cert.bound {
            CertifiedBound::Interval { accumulation_warning, .. } => {
                assert!(accumulation_warning)
            }
            _ => panic!("expected interval bound"),
        }
    }

    #[test]
    fn sweep_budget_counts_and_splits_confidence() {
        let s = samples(&[10.0, 20.0, 30.0]);
        let pts = sweep_budget(&s, &[0.0, 30.0], 0.1).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].q_star, 3);
        assert_eq!(pts[0].epsilon, 1.0); // all violated
        assert_eq!(pts[1].q_star, 0);
        let closed =
            bounds::testset_epsilon(3, 0.05, 0).unwrap().epsilon;
        assert!((pts[1].epsilon - closed).abs() < 1e-15);
    }

    #[test]
    fn sweep_rho_vacuous_point_when_target_exceeds_n() {
        let s = samples(&[1.0, 2.0, 3.0]);
        let pts = sweep_rho(&s, &[4], 0.05).unwrap();
        assert_eq!(pts[0].y_value, 0.0);
        assert_eq!(pts[0].epsilon, 1.0);
    }
}
