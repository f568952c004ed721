//! Inversion of the scenario risk-bound equations.
//!
//! Four bound families are exposed, all driven by bracketed bisection over
//! log-domain evaluations (see [`eval`] for the normalization scheme):
//!
//! * [`binomial_epsilon`] — the a-priori convex bound: the unique
//!   `ε ∈ (0,1)` with `β = Σ_{i=0}^{d-1} C(N,i) ε^i (1-ε)^{N-i}`; for a
//!   scalar decision (`d = 1`) this is the closed form `ε = 1 - β^{1/N}`.
//! * [`epsilon_posteriori`] — the a-posteriori bound indexed by the observed
//!   complexity `q`: solves
//!   `(β/N) Σ_{m=q}^{N-1} C(m,q) t^{m-q} = C(N,q) t^{N-q}`
//!   for its unique root `t(q) ∈ (0,1)` and returns `ε(q) = 1 - t(q)`,
//!   with `ε(N) = 1` by definition.
//! * [`epsilon_interval`] — the two-sided bound under non-accumulation:
//!   finds the two nonnegative roots `t̲(q) ≤ t̄(q)` of
//!   `C(N,q) t^{N-q} = (β/(2N)) Σ_{i=q}^{N-1} C(i,q) t^{i-q}
//!                   + (β/(6N)) Σ_{i=N+1}^{4N} C(i,q) t^{i-q}`
//!   and returns `[max{0, 1 - t̄}, 1 - t̲]`; at `q = N` the equation has a
//!   single root `t̄(N)` and `t̲(N) = 0` by definition.
//! * [`testset_epsilon`] — the baseline bound for a sample-independent
//!   decision with `k` observed violations: inverts the binomial tail
//!   `Σ_{i=0}^{k} C(N,i) ε^i (1-ε)^{N-i} = β`.
//!
//! All operations are pure; identical queries return bit-identical results.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

mod eval;
mod root;

use eval::{interval_terms, log_sum, posteriori_terms, BinomialTail};
use root::{bisect, RootOutcome, SignEval};

/// Inputs shared by the bound families.
///
/// `complexity` is the a-posteriori count `q` (or `s*`) for
/// [`epsilon_posteriori`] / [`epsilon_interval`]; values above `n_samples`
/// are clamped to `n_samples` before evaluation, which yields the vacuous
/// bound `ε = 1`. `dimension` is the decision dimension `d` used only by
/// [`binomial_epsilon`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundQuery {
    /// Number of samples `N`.
    pub n_samples: usize,
    /// Confidence parameter `β`, strictly inside `(0, 1)`.
    pub confidence_beta: f64,
    /// A-posteriori complexity `q` (clamped to `n_samples`).
    pub complexity: usize,
    /// Decision dimension `d ≥ 1`.
    pub dimension: usize,
}

impl BoundQuery {
    /// Query for the a-posteriori families at complexity `q`.
    pub fn with_complexity(n_samples: usize, confidence_beta: f64, complexity: usize) -> Self {
        Self { n_samples, confidence_beta, complexity, dimension: 1 }
    }

    /// Query for the a-priori binomial family at decision dimension `d`.
    pub fn with_dimension(n_samples: usize, confidence_beta: f64, dimension: usize) -> Self {
        Self { n_samples, confidence_beta, complexity: 0, dimension }
    }

    fn check_common(&self) -> Result<(), BoundsError> {
        if self.n_samples == 0 {
            return Err(BoundsError::InvalidSampleCount);
        }
        if !(self.confidence_beta > 0.0 && self.confidence_beta < 1.0) {
            return Err(BoundsError::InvalidBeta { beta: self.confidence_beta });
        }
        Ok(())
    }
}

/// Which bound family produced an [`EpsilonResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    /// A-priori binomial-tail bound.
    Binomial,
    /// A-posteriori complexity-indexed bound.
    Posteriori,
    /// Test-set baseline bound.
    TestSet,
}

impl BoundMethod {
    /// Stable lower-case name used in serialized output.
    pub fn name(&self) -> &'static str {
        match self {
            BoundMethod::Binomial => "binomial",
            BoundMethod::Posteriori => "posteriori",
            BoundMethod::TestSet => "testset",
        }
    }
}

/// A solved one-sided risk bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonResult {
    /// Certified violation-probability bound, in `[0, 1]`.
    pub epsilon: f64,
    /// Family that produced the bound.
    pub method: BoundMethod,
    /// Root `t(q)` of the defining equation, when one was solved.
    pub root_t: Option<f64>,
    /// Absolute value of the normalized defining equation at the returned
    /// root (0 for closed-form and definitional branches).
    pub residual: f64,
    /// Number of equation evaluations spent bracketing and bisecting.
    pub iterations_used: u32,
}

/// A solved two-sided risk bound `[ε̲, ε̄]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonInterval {
    /// Lower risk bound `ε̲(q) = max{0, 1 - t̄(q)}`.
    pub epsilon_lower: f64,
    /// Upper risk bound `ε̄(q) = 1 - t̲(q)`.
    pub epsilon_upper: f64,
    /// Smaller root `t̲(q)` (0 by definition at `q = N`).
    pub root_t_lower: f64,
    /// Larger root `t̄(q)`.
    pub root_t_upper: f64,
    /// Relative residual of the defining equation at `t̲(q)`.
    pub residual_lower: f64,
    /// Relative residual of the defining equation at `t̄(q)`.
    pub residual_upper: f64,
}

/// Root-finder controls shared by every bound family.
#[derive(Clone, Copy, Debug)]
pub struct RootConfig {
    /// Absolute bracket-width target on the root variable.
    pub abs_tolerance_t: f64,
    /// Evaluation budget per bracketing or bisection phase.
    pub max_bisection_steps: u32,
    /// Multiplicative step used to grow brackets upward.
    pub bracket_growth: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { abs_tolerance_t: 1e-12, max_bisection_steps: 200, bracket_growth: 2.0 }
    }
}

impl RootConfig {
    fn check(&self) -> Result<(), BoundsError> {
        if !(self.abs_tolerance_t > 0.0) || !(self.bracket_growth > 1.0) {
            return Err(BoundsError::InvalidRootConfig);
        }
        Ok(())
    }
}

/// Errors from the bound operations.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundsError {
    /// `confidence_beta` outside the open interval `(0, 1)`.
    InvalidBeta {
        /// Offending value.
        beta: f64,
    },
    /// `n_samples` was zero.
    InvalidSampleCount,
    /// Decision dimension outside `1..=n_samples`.
    DimensionOutOfRange {
        /// Offending dimension.
        dimension: usize,
        /// Sample count it was checked against.
        n_samples: usize,
    },
    /// Violation count above `n_samples` in [`testset_epsilon`].
    ViolationsOutOfRange {
        /// Offending count.
        violations: usize,
        /// Sample count it was checked against.
        n_samples: usize,
    },
    /// `q > m` in [`log_binomial`].
    BinomialDomain {
        /// Upper index.
        m: u64,
        /// Lower index.
        q: u64,
    },
    /// Invalid [`RootConfig`].
    InvalidRootConfig,
    /// No sign change found within the configured bracketing budget; carries
    /// the last evaluated `(t, delta)` pairs for diagnosis.
    BracketFailure {
        /// Which bracketing phase failed.
        context: &'static str,
        /// Most recent `(t, oriented delta)` evaluations.
        trace: Vec<(f64, f64)>,
    },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::InvalidBeta { beta } => {
                write!(f, "confidence beta must lie strictly inside (0, 1), got {beta}")
            }
            BoundsError::InvalidSampleCount => write!(f, "n_samples must be at least 1"),
            BoundsError::DimensionOutOfRange { dimension, n_samples } => {
                write!(f, "dimension {dimension} outside 1..={n_samples}")
            }
            BoundsError::ViolationsOutOfRange { violations, n_samples } => {
                write!(f, "violations {violations} exceeds n_samples {n_samples}")
            }
            BoundsError::BinomialDomain { m, q } => {
                write!(f, "binomial coefficient requires q <= m, got C({m}, {q})")
            }
            BoundsError::InvalidRootConfig => {
                write!(f, "root config requires abs_tolerance_t > 0 and bracket_growth > 1")
            }
            BoundsError::BracketFailure { context, trace } => {
                write!(f, "no sign change while {context}; last evaluations: ")?;
                for (t, d) in trace {
                    write!(f, "({t:e} -> {d:e}) ")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for BoundsError {}

/// `ln C(m, q)` via log-gamma.
pub fn log_binomial(m: u64, q: u64) -> Result<f64, BoundsError> {
    if q > m {
        return Err(BoundsError::BinomialDomain { m, q });
    }
    Ok(math::ln_gamma(m as f64 + 1.0)
        - math::ln_gamma(q as f64 + 1.0)
        - math::ln_gamma((m - q) as f64 + 1.0))
}

fn binomial_tail_eval(tail: &BinomialTail, ln_beta: f64, beta: f64, eps: f64) -> SignEval {
    let lhs = tail.log_eval(eps);
    SignEval { delta: lhs - ln_beta, residual: (math::exp(lhs) - beta).abs() }
}

/// Shared inverse of the binomial lower tail at `k` retained terms.
fn invert_binomial_tail(
    n: usize,
    beta: f64,
    k: usize,
    cfg: &RootConfig,
) -> (f64, f64, u32) {
    let tail = BinomialTail::new(n, k);
    let ln_beta = math::ln(beta);
    // tail(0+) = 1 > beta and tail(1-) = 0 < beta: virtual endpoint signs.
    let out = bisect(
        |eps| binomial_tail_eval(&tail, ln_beta, beta, eps),
        0.0,
        1.0,
        true,
        None,
        cfg,
        cfg.max_bisection_steps,
    );
    (out.t, out.residual, out.evaluations)
}

/// A-priori binomial bound (dimension-`d` convex scenario program).
pub fn binomial_epsilon(query: &BoundQuery) -> Result<EpsilonResult, BoundsError> {
    binomial_epsilon_with(query, &RootConfig::default())
}

/// [`binomial_epsilon`] with explicit root-finder controls.
pub fn binomial_epsilon_with(
    query: &BoundQuery,
    cfg: &RootConfig,
) -> Result<EpsilonResult, BoundsError> {
    query.check_common()?;
    cfg.check()?;
    let (n, beta, d) = (query.n_samples, query.confidence_beta, query.dimension);
    if d == 0 || d > n {
        return Err(BoundsError::DimensionOutOfRange { dimension: d, n_samples: n });
    }
    if d == 1 {
        // Closed form 1 - beta^(1/N); at N = 1 the equation is 1 - beta exactly.
        let epsilon =
            if n == 1 { 1.0 - beta } else { -math::exp_m1(math::ln(beta) / n as f64) };
        let residual = (math::exp(n as f64 * math::ln_1p(-epsilon)) - beta).abs();
        return Ok(EpsilonResult {
            epsilon,
            method: BoundMethod::Binomial,
            root_t: None,
            residual,
            iterations_used: 0,
        });
    }
    let (epsilon, residual, iterations_used) = invert_binomial_tail(n, beta, d - 1, cfg);
    Ok(EpsilonResult {
        epsilon,
        method: BoundMethod::Binomial,
        root_t: None,
        residual,
        iterations_used,
    })
}

/// Test-set baseline bound at `violations` observed violations.
pub fn testset_epsilon(
    n_samples: usize,
    beta: f64,
    violations: usize,
) -> Result<EpsilonResult, BoundsError> {
    testset_epsilon_with(n_samples, beta, violations, &RootConfig::default())
}

/// [`testset_epsilon`] with explicit root-finder controls.
pub fn testset_epsilon_with(
    n_samples: usize,
    beta: f64,
    violations: usize,
    cfg: &RootConfig,
) -> Result<EpsilonResult, BoundsError> {
    let query = BoundQuery::with_complexity(n_samples, beta, violations);
    query.check_common()?;
    cfg.check()?;
    if violations > n_samples {
        return Err(BoundsError::ViolationsOutOfRange { violations, n_samples });
    }
    if violations == n_samples {
        // The tail is identically 1; the boundary value is returned by convention.
        return Ok(EpsilonResult {
            epsilon: 1.0,
            method: BoundMethod::TestSet,
            root_t: None,
            residual: 0.0,
            iterations_used: 0,
        });
    }
    let (epsilon, residual, iterations_used) =
        invert_binomial_tail(n_samples, beta, violations, cfg);
    Ok(EpsilonResult {
        epsilon,
        method: BoundMethod::TestSet,
        root_t: None,
        residual,
        iterations_used,
    })
}

/// A-posteriori bound `ε(q) = 1 - t(q)` at the clamped complexity `q`.
pub fn epsilon_posteriori(query: &BoundQuery) -> Result<EpsilonResult, BoundsError> {
    epsilon_posteriori_with(query, &RootConfig::default())
}

/// [`epsilon_posteriori`] with explicit root-finder controls.
pub fn epsilon_posteriori_with(
    query: &BoundQuery,
    cfg: &RootConfig,
) -> Result<EpsilonResult, BoundsError> {
    query.check_common()?;
    cfg.check()?;
    let (n, beta) = (query.n_samples, query.confidence_beta);
    let q = query.complexity.min(n);
    if q == n {
        // Defined directly as 1; no equation to solve.
        return Ok(EpsilonResult {
            epsilon: 1.0,
            method: BoundMethod::Posteriori,
            root_t: None,
            residual: 0.0,
            iterations_used: 0,
        });
    }
    if n == 1 {
        // The equation reduces to beta - t = 0.
        return Ok(EpsilonResult {
            epsilon: 1.0 - beta,
            method: BoundMethod::Posteriori,
            root_t: Some(beta),
            residual: 0.0,
            iterations_used: 0,
        });
    }

    let terms = posteriori_terms(n, q, beta);
    let np = (n - q) as f64;
    let mut evaluate = |t: f64| -> SignEval {
        let ln_t = math::ln(t);
        let lhs = log_sum(&[&terms], ln_t);
        let rhs = np * ln_t;
        SignEval { delta: lhs - rhs, residual: (math::exp(lhs) - math::exp(rhs)).abs() }
    };

    // The equation is positive as t -> 0+ and negative at t = 1; shrink
    // geometrically from 1 until the sign turns positive.
    let mut lo = 0.5;
    let mut hi = 1.0;
    let mut shrink_evals = 0u32;
    let seed = loop {
        if shrink_evals >= cfg.max_bisection_steps {
            return Err(BoundsError::BracketFailure {
                context: "shrinking toward the a-posteriori root",
                trace: alloc::vec![(lo, evaluate(lo).delta), (hi, evaluate(hi).delta)],
            });
        }
        let e = evaluate(lo);
        shrink_evals += 1;
        if e.delta > 0.0 {
            break Some((lo, e));
        }
        if e.delta == 0.0 {
            return Ok(EpsilonResult {
                epsilon: 1.0 - lo,
                method: BoundMethod::Posteriori,
                root_t: Some(lo),
                residual: e.residual,
                iterations_used: shrink_evals,
            });
        }
        hi = lo;
        lo *= 0.5;
    };

    let out = bisect(&mut evaluate, lo, hi, true, seed, cfg, cfg.max_bisection_steps);
    Ok(EpsilonResult {
        epsilon: 1.0 - out.t,
        method: BoundMethod::Posteriori,
        root_t: Some(out.t),
        residual: out.residual,
        iterations_used: shrink_evals + out.evaluations,
    })
}

/// Geometric scan grid for the interval equation: ratio 1.1 from 1e-6,
/// capped at 1e6.
const SCAN_START: f64 = 1e-6;
const SCAN_RATIO: f64 = 1.1;
const SCAN_CAP: f64 = 1e6;

/// Two-sided bound `[ε̲(q), ε̄(q)]` at the clamped complexity `q`.
pub fn epsilon_interval(query: &BoundQuery) -> Result<EpsilonInterval, BoundsError> {
    epsilon_interval_with(query, &RootConfig::default())
}

/// [`epsilon_interval`] with explicit root-finder controls.
pub fn epsilon_interval_with(
    query: &BoundQuery,
    cfg: &RootConfig,
) -> Result<EpsilonInterval, BoundsError> {
    query.check_common()?;
    cfg.check()?;
    let (n, beta) = (query.n_samples, query.confidence_beta);
    let q = query.complexity.min(n);
    let (low_terms, high_terms) = interval_terms(n, q, beta);
    let np = (n - q) as f64;
    let mut evaluate = |t: f64| -> SignEval {
        let ln_t = math::ln(t);
        let lhs = np * ln_t;
        let rhs = log_sum(&[&low_terms, &high_terms], ln_t);
        let delta = lhs - rhs;
        SignEval { delta, residual: -math::exp_m1(-delta.abs()) }
    };

    if q == n {
        debug_assert!(low_terms.is_empty());
        // Single-root variant: positive near 0, strictly decreasing; grow
        // upward until the sign flips and bisect for the unique root.
        let mut lo = SCAN_START;
        let mut e_lo = evaluate(lo);
        let mut steps = 0u32;
        if e_lo.delta <= 0.0 {
            // Root below the scan start: bracket down to 0.
            let out =
                bisect(&mut evaluate, 0.0, lo, true, None, cfg, cfg.max_bisection_steps);
            return Ok(interval_from_upper_root(out));
        }
        loop {
            if steps >= cfg.max_bisection_steps {
                return Err(BoundsError::BracketFailure {
                    context: "growing toward the single interval root",
                    trace: alloc::vec![(lo, e_lo.delta)],
                });
            }
            let hi = lo * cfg.bracket_growth;
            let e_hi = evaluate(hi);
            steps += 1;
            if e_hi.delta <= 0.0 {
                let out = bisect(
                    &mut evaluate,
                    lo,
                    hi,
                    true,
                    Some((lo, e_lo)),
                    cfg,
                    cfg.max_bisection_steps,
                );
                return Ok(interval_from_upper_root(out));
            }
            lo = hi;
            e_lo = e_hi;
        }
    }

    // q < N: negative near 0 and near infinity, positive on an interior
    // interval. Scan the geometric grid for a positive point.
    let mut t = SCAN_START;
    let mut prev = 0.0; // virtual negative endpoint at 0
    let mut positive: Option<(f64, SignEval)> = None;
    let mut last_neg = (0.0, f64::NEG_INFINITY);
    while t <= SCAN_CAP {
        let e = evaluate(t);
        if e.delta > 0.0 {
            positive = Some((t, e));
            break;
        }
        last_neg = (t, e.delta);
        prev = t;
        t *= SCAN_RATIO;
    }

    // The scan can straddle a narrow positive hump; the a-posteriori root
    // localizes it, so probe there before giving up.
    let (t_pos, e_pos, upper_neg) = match positive {
        Some((tp, ep)) => (tp, ep, None),
        None => {
            let anchor = epsilon_posteriori_with(query, cfg)?;
            let t2 = anchor.root_t.unwrap_or(0.5);
            let e2 = evaluate(t2);
            if e2.delta > 0.0 {
                // Neighboring scan-grid points are known to be negative.
                let below = grid_point_below(t2);
                (t2, e2, Some(below * SCAN_RATIO))
            } else {
                return Err(BoundsError::BracketFailure {
                    context: "scanning for a positive point of the interval equation",
                    trace: alloc::vec![last_neg, (t2, e2.delta)],
                });
            }
        }
    };
    let lower_bracket_lo = match upper_neg {
        None => prev,
        Some(_) => grid_point_below(t_pos),
    };

    // Lower root: delta < 0 on the low side of [lower_bracket_lo, t_pos].
    let lower = bisect(
        &mut evaluate,
        lower_bracket_lo,
        t_pos,
        false,
        Some((t_pos, e_pos)),
        cfg,
        cfg.max_bisection_steps,
    );

    // Upper root: grow the bracket upward from the positive point.
    let mut lo = t_pos;
    let mut e_lo = e_pos;
    let mut hi = upper_neg.unwrap_or(t_pos * cfg.bracket_growth);
    let mut steps = 0u32;
    let upper = loop {
        if steps >= cfg.max_bisection_steps {
            return Err(BoundsError::BracketFailure {
                context: "growing toward the upper interval root",
                trace: alloc::vec![(lo, e_lo.delta), (hi, f64::NAN)],
            });
        }
        let e_hi = evaluate(hi);
        steps += 1;
        if e_hi.delta <= 0.0 {
            break bisect(
                &mut evaluate,
                lo,
                hi,
                true,
                Some((lo, e_lo)),
                cfg,
                cfg.max_bisection_steps,
            );
        }
        lo = hi;
        e_lo = e_hi;
        hi *= cfg.bracket_growth;
    };

    Ok(EpsilonInterval {
        epsilon_lower: (1.0 - upper.t).max(0.0),
        epsilon_upper: 1.0 - lower.t,
        root_t_lower: lower.t,
        root_t_upper: upper.t,
        residual_lower: lower.residual,
        residual_upper: upper.residual,
    })
}

/// Largest grid point of the geometric scan strictly below `t`.
fn grid_point_below(t: f64) -> f64 {
    let mut g = SCAN_START;
    while g * SCAN_RATIO < t {
        g *= SCAN_RATIO;
    }
    g
}

fn interval_from_upper_root(out: RootOutcome) -> EpsilonInterval {
    EpsilonInterval {
        epsilon_lower: (1.0 - out.t).max(0.0),
        epsilon_upper: 1.0,
        root_t_lower: 0.0,
        root_t_upper: out.t,
        residual_lower: 0.0,
        residual_upper: out.residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_binomial_small_cases() {
        assert!((log_binomial(5, 2).unwrap() - math::ln(10.0)).abs() < 1e-12);
        assert_eq!(log_binomial(7, 0).unwrap(), 0.0);
        assert!(matches!(
            log_binomial(3, 4),
            Err(BoundsError::BinomialDomain { m: 3, q: 4 })
        ));
    }

    #[test]
    fn binomial_epsilon_closed_form() {
        let r = binomial_epsilon(&BoundQuery::with_dimension(1, 0.05, 1)).unwrap();
        assert_eq!(r.epsilon, 0.95);
        let r = binomial_epsilon(&BoundQuery::with_dimension(1000, 1e-4, 1)).unwrap();
        assert!((r.epsilon - 0.009168).abs() < 5e-7, "epsilon {}", r.epsilon);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn binomial_epsilon_rejects_bad_dimension() {
        assert!(binomial_epsilon(&BoundQuery::with_dimension(10, 0.5, 11)).is_err());
        assert!(binomial_epsilon(&BoundQuery::with_dimension(10, 0.5, 0)).is_err());
        assert!(binomial_epsilon(&BoundQuery::with_dimension(10, 1.0, 1)).is_err());
    }

    #[test]
    fn posteriori_single_sample_reduces_analytically() {
        let r = epsilon_posteriori(&BoundQuery::with_complexity(1, 0.05, 0)).unwrap();
        assert_eq!(r.epsilon, 0.95);
        assert_eq!(r.root_t, Some(0.05));
    }

    #[test]
    fn posteriori_full_complexity_is_vacuous() {
        let r = epsilon_posteriori(&BoundQuery::with_complexity(40, 0.01, 40)).unwrap();
        assert_eq!(r.epsilon, 1.0);
        // Values above N clamp to N.
        let r = epsilon_posteriori(&BoundQuery::with_complexity(40, 0.01, 41)).unwrap();
        assert_eq!(r.epsilon, 1.0);
    }

    #[test]
    fn posteriori_root_is_interior_with_small_residual() {
        let r = epsilon_posteriori(&BoundQuery::with_complexity(1000, 1e-4, 0)).unwrap();
        let t = r.root_t.unwrap();
        assert!(t > 0.0 && t < 1.0);
        assert!(r.residual <= 1e-10, "residual {}", r.residual);
        assert!(r.epsilon > 0.010 && r.epsilon < 0.013, "epsilon {}", r.epsilon);
    }

    #[test]
    fn testset_boundary_convention() {
        let r = testset_epsilon(10, 0.5, 10).unwrap();
        assert_eq!(r.epsilon, 1.0);
        assert!(testset_epsilon(10, 0.5, 11).is_err());
    }

    #[test]
    fn testset_zero_violations_matches_closed_form() {
        for &(n, beta) in &[(1000usize, 1e-4f64), (50, 0.05), (200, 0.7)] {
            let ts = testset_epsilon(n, beta, 0).unwrap();
            let b1 = binomial_epsilon(&BoundQuery::with_dimension(n, beta, 1)).unwrap();
            assert!(
                (ts.epsilon - b1.epsilon).abs() <= 1e-12,
                "N={n} beta={beta}: {} vs {}",
                ts.epsilon,
                b1.epsilon
            );
        }
    }

    #[test]
    fn interval_orders_and_full_complexity() {
        let iv = epsilon_interval(&BoundQuery::with_complexity(100, 0.05, 100)).unwrap();
        assert_eq!(iv.epsilon_upper, 1.0);
        assert_eq!(iv.root_t_lower, 0.0);
        assert!(iv.epsilon_lower > 0.0 && iv.epsilon_lower < 1.0);

        for q in [0usize, 1, 5, 20] {
            let iv = epsilon_interval(&BoundQuery::with_complexity(100, 0.05, q)).unwrap();
            assert!(
                iv.epsilon_lower <= iv.epsilon_upper,
                "q={q}: [{}, {}]",
                iv.epsilon_lower,
                iv.epsilon_upper
            );
            assert!(iv.root_t_lower <= iv.root_t_upper);
            assert!(iv.residual_lower <= 1e-10 && iv.residual_upper <= 1e-10);
        }
    }

    #[test]
    fn interval_upper_tracks_posteriori() {
        let q = BoundQuery::with_complexity(1000, 1e-4, 1);
        let iv = epsilon_interval(&q).unwrap();
        let p = epsilon_posteriori(&q).unwrap();
        let rel = (iv.epsilon_upper - p.epsilon).abs() / p.epsilon;
        assert!(rel < 0.2, "relative gap {rel}");
    }
}
