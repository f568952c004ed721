//! Ground-truth machinery: synthetic sample distributions with exactly
//! computable risk, Monte-Carlo verification of the certification
//! statements, and executable checks of the consistency conditions the
//! scenario map must satisfy.
//!
//! A [`SyntheticSpec`] is a finite support with probabilities, optionally
//! smeared by uniform jitter narrower than half the minimal support gap.
//! Jitter makes the distribution continuous (no value accumulation) while
//! keeping the exact tail computable in closed form, so a certified bound
//! can be compared against the *true* risk of the learned decision.

use alloc::vec::Vec;
use core::fmt;

use crate::bounds;
use crate::rng::SubstreamRng;
use crate::scenario::{
    self, BoundChoice, CertifiedBound, SampleValues, ScenarioError,
};

/// Finite-support distribution, optionally jittered to a continuous one.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    support: Vec<f64>,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
    jitter: f64,
    seed: u64,
}

impl SyntheticSpec {
    /// Validates and builds a spec.
    ///
    /// Requirements: strictly increasing nonnegative support, nonnegative
    /// probabilities summing to 1 within `1e-12`, and jitter either zero or
    /// strictly below half the minimal support gap.
    pub fn new(
        support: Vec<f64>,
        probabilities: Vec<f64>,
        jitter: f64,
        seed: u64,
    ) -> Result<Self, ValidationError> {
        if support.is_empty() || support.len() != probabilities.len() {
            return Err(ValidationError::MalformedSpec {
                reason: "support and probabilities must be nonempty and equal-length",
            });
        }
        let mut min_gap = f64::INFINITY;
        for (i, &s) in support.iter().enumerate() {
            if !s.is_finite() || s < 0.0 {
                return Err(ValidationError::MalformedSpec {
                    reason: "support values must be finite and nonnegative",
                });
            }
            if i > 0 {
                let gap = s - support[i - 1];
                if gap <= 0.0 {
                    return Err(ValidationError::MalformedSpec {
                        reason: "support must be strictly increasing",
                    });
                }
                min_gap = min_gap.min(gap);
            }
        }
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(probabilities.len());
        for &p in &probabilities {
            if !p.is_finite() || p < 0.0 {
                return Err(ValidationError::MalformedSpec {
                    reason: "probabilities must be finite and nonnegative",
                });
            }
            total += p;
            cumulative.push(total);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(ValidationError::MalformedSpec {
                reason: "probabilities must sum to 1 within 1e-12",
            });
        }
        if jitter < 0.0 || !jitter.is_finite() {
            return Err(ValidationError::MalformedSpec { reason: "jitter must be >= 0" });
        }
        if jitter > 0.0 && !(jitter < 0.5 * min_gap) {
            return Err(ValidationError::MalformedSpec {
                reason: "jitter must stay below half the minimal support gap",
            });
        }
        Ok(Self { support, probabilities, cumulative, jitter, seed })
    }

    /// Support points, ascending.
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Probabilities parallel to [`Self::support`].
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Jitter width (0 for a discrete spec).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Base seed for sample draws.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True when the induced distribution has atoms.
    pub fn is_discrete(&self) -> bool {
        self.jitter == 0.0
    }

    fn draw(&self, rng: &mut SubstreamRng) -> f64 {
        let u = rng.next_unit();
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.support.len() - 1);
        let base = self.support[idx];
        if self.jitter > 0.0 {
            base + rng.next_unit() * self.jitter
        } else {
            base
        }
    }
}

/// Outcome of a Monte-Carlo coverage run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageReport {
    /// Number of independent repetitions.
    pub repetitions: usize,
    /// Repetitions whose true risk escaped the certified bound.
    pub failures: usize,
    /// `failures / repetitions`.
    pub failure_rate: f64,
    /// Confidence parameter the bounds were computed at.
    pub beta: f64,
    /// Three-sigma binomial allowance `3 * sqrt(beta * (1-beta) / repetitions)`.
    pub binomial_3sigma: f64,
}

/// Which certification path a coverage run exercises.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CertMode {
    /// Robust program + scalar binomial bound.
    Robust,
    /// Relaxed program + one-sided a-posteriori bound at `s*`.
    Relaxed {
        /// Relaxation weight.
        rho: f64,
    },
    /// Relaxed program + two-sided interval bound at `s*`.
    Interval {
        /// Relaxation weight.
        rho: f64,
    },
}

/// Per-condition outcome of a consistency check.
///
/// Conditions (ii) and (iii) are mutually exclusive for a given `extra`
/// set: which one applies depends on whether the first decision already
/// covers every appended value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    /// Permuting the samples left `(y*, q*)` unchanged.
    pub permutation_invariant: bool,
    /// Appending covered values left `(y*, q*)` unchanged (when applicable).
    pub confirmation_holds: Option<bool>,
    /// Appending an uncovered value changed `(y*, q*)` (when applicable).
    pub responsiveness_holds: Option<bool>,
}

impl ConsistencyReport {
    /// True when every applicable condition held.
    pub fn all_hold(&self) -> bool {
        self.permutation_invariant
            && self.confirmation_holds.unwrap_or(true)
            && self.responsiveness_holds.unwrap_or(true)
    }
}

/// Errors from the validation operations.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationError {
    /// Spec failed validation.
    MalformedSpec {
        /// Human-readable reason.
        reason: &'static str,
    },
    /// Too few repetitions for a meaningful rate.
    TooFewRepetitions {
        /// Requested repetitions.
        repetitions: usize,
    },
    /// Error propagated from the scenario layer.
    Scenario(ScenarioError),
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::MalformedSpec { reason } => write!(f, "malformed spec: {reason}"),
            ValidationError::TooFewRepetitions { repetitions } => {
                write!(f, "need at least 100 repetitions, got {repetitions}")
            }
            ValidationError::Scenario(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ValidationError {}

impl From<ScenarioError> for ValidationError {
    fn from(e: ScenarioError) -> Self {
        ValidationError::Scenario(e)
    }
}

impl From<bounds::BoundsError> for ValidationError {
    fn from(e: bounds::BoundsError) -> Self {
        ValidationError::Scenario(ScenarioError::Bounds(e))
    }
}

/// Exact tail probability `P(value > y)` of the spec's distribution.
///
/// For a discrete spec this is the probability mass strictly above `y`.
/// With jitter `w > 0` each atom `s` contributes `p` for `y <= s`, a
/// linearly interpolated `p * (1 - (y - s)/w)` for `y` inside `(s, s + w)`,
/// and 0 beyond.
pub fn exact_risk(spec: &SyntheticSpec, y: f64) -> f64 {
    let w = spec.jitter;
    let mut risk = 0.0;
    for (&s, &p) in spec.support.iter().zip(&spec.probabilities) {
        if w == 0.0 {
            if s > y {
                risk += p;
            }
        } else if y <= s {
            risk += p;
        } else if y < s + w {
            risk += p * (1.0 - (y - s) / w);
        }
    }
    risk.min(1.0)
}

/// Outcome of a single coverage repetition; exposed so external drivers
/// can run repetitions in parallel and reduce deterministically.
pub fn run_repetition(
    spec: &SyntheticSpec,
    n_samples: usize,
    beta: f64,
    mode: CertMode,
    repetition: u64,
) -> Result<bool, ValidationError> {
    let mut rng = SubstreamRng::new(spec.seed, repetition);
    let values: Vec<f64> = (0..n_samples).map(|_| spec.draw(&mut rng)).collect();
    let samples = SampleValues::from_values(values)?;
    let failed = match mode {
        CertMode::Robust => {
            let (solution, eps) = scenario::certify_robust(&samples, beta)?;
            exact_risk(spec, solution.y_star) > eps.epsilon
        }
        CertMode::Relaxed { rho } => {
            let cert = scenario::certify_relaxed(&samples, rho, beta, BoundChoice::Posteriori)?;
            let eps = match cert.bound {
                CertifiedBound::Point(e) => e.epsilon,
                CertifiedBound::Interval { .. } => unreachable!(),
            };
            exact_risk(spec, cert.solution.y_star) > eps
        }
        CertMode::Interval { rho } => {
            let cert = scenario::certify_relaxed(&samples, rho, beta, BoundChoice::Interval)?;
            let (lo, hi) = match cert.bound {
                CertifiedBound::Interval { interval, .. } => {
                    (interval.epsilon_lower, interval.epsilon_upper)
                }
                CertifiedBound::Point(_) => unreachable!(),
            };
            let risk = exact_risk(spec, cert.solution.y_star);
            !(lo <= risk && risk <= hi)
        }
    };
    Ok(failed)
}

/// Runs `repetitions` independent draws of `n_samples` values, certifies
/// each, and counts how often the exact risk escapes the certified bound.
pub fn pac_monte_carlo(
    spec: &SyntheticSpec,
    n_samples: usize,
    beta: f64,
    mode: CertMode,
    repetitions: usize,
) -> Result<CoverageReport, ValidationError> {
    if repetitions < 100 {
        return Err(ValidationError::TooFewRepetitions { repetitions });
    }
    let mut failures = 0usize;
    for rep in 0..repetitions {
        if run_repetition(spec, n_samples, beta, mode, rep as u64)? {
            failures += 1;
        }
    }
    Ok(coverage_report(repetitions, failures, beta))
}

/// Assembles a [`CoverageReport`] from a failure count; used by both the
/// serial loop above and parallel drivers.
pub fn coverage_report(repetitions: usize, failures: usize, beta: f64) -> CoverageReport {
    CoverageReport {
        repetitions,
        failures,
        failure_rate: failures as f64 / repetitions as f64,
        beta,
        binomial_3sigma: 3.0 * crate::math::sqrt(beta * (1.0 - beta) / repetitions as f64),
    }
}

/// Checks the three consistency conditions on concrete data.
///
/// Condition (i) is checked against three deterministic permutations
/// (reversed, rotated, sorted descending). Conditions (ii)/(iii) compare
/// `(y*, q*)` before and after appending `extra`; which of the two applies
/// depends on whether all appended values are covered by the first
/// solution.
pub fn consistency_check(
    values: &SampleValues,
    extra: &SampleValues,
    rho: f64,
) -> Result<ConsistencyReport, ScenarioError> {
    let base = scenario::solve_relaxed(values, rho)?;
    let key = (base.y_star, base.q_star);

    let mut permutation_invariant = true;
    let n = values.len();
    let perm_ids: [Vec<usize>; 3] = [
        (0..n).rev().collect(),
        (0..n).map(|i| (i + n / 2) % n).collect(),
        {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| values.values()[b].total_cmp(&values.values()[a]));
            idx
        },
    ];
    for perm in &perm_ids {
        let v: Vec<f64> = perm.iter().map(|&i| values.values()[i]).collect();
        let ids: Vec<u64> = perm.iter().map(|&i| values.sample_ids()[i]).collect();
        let permuted = SampleValues::new(v, ids)?;
        let sol = scenario::solve_relaxed(&permuted, rho)?;
        if (sol.y_star, sol.q_star) != key {
            permutation_invariant = false;
        }
    }

    let mut merged_values = values.values().to_vec();
    merged_values.extend_from_slice(extra.values());
    let merged_ids: Vec<u64> = (0..merged_values.len() as u64).collect();
    let merged = SampleValues::new(merged_values, merged_ids)?;
    let sol = scenario::solve_relaxed(&merged, rho)?;
    let appended_key = (sol.y_star, sol.q_star);

    let all_covered = extra.values().iter().all(|&v| v <= base.y_star);
    let (confirmation_holds, responsiveness_holds) = if all_covered {
        (Some(appended_key == key), None)
    } else {
        (None, Some(appended_key != key))
    };

    Ok(ConsistencyReport { permutation_invariant, confirmation_holds, responsiveness_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec_123() -> SyntheticSpec {
        SyntheticSpec::new(vec![1.0, 2.0, 3.0], vec![0.2, 0.3, 0.5], 0.0, 9).unwrap()
    }

    #[test]
    fn exact_risk_discrete() {
        let s = spec_123();
        assert_eq!(exact_risk(&s, 1.0), 0.8);
        assert_eq!(exact_risk(&s, 3.0), 0.0);
        assert_eq!(exact_risk(&s, 0.5), 1.0);
    }

    #[test]
    fn exact_risk_with_jitter_interpolates() {
        let s = SyntheticSpec::new(vec![1.0, 2.0], vec![0.4, 0.6], 0.4, 9).unwrap();
        assert_eq!(exact_risk(&s, 0.9), 1.0);
        assert_eq!(exact_risk(&s, 1.0), 1.0); // jitter is half-open above the atom
        assert!((exact_risk(&s, 1.2) - (0.6 + 0.4 * 0.5)).abs() < 1e-15);
        assert_eq!(exact_risk(&s, 1.4), 0.6);
        assert_eq!(exact_risk(&s, 2.4), 0.0);
    }

    #[test]
    fn exact_risk_nonincreasing_on_grid() {
        let s = SyntheticSpec::new(vec![1.0, 2.0, 5.0], vec![0.5, 0.25, 0.25], 0.3, 9).unwrap();
        let mut last = 1.0;
        let mut y = 0.0;
        while y < 6.0 {
            let r = exact_risk(&s, y);
            assert!(r <= last + 1e-15, "risk increased at y={y}");
            last = r;
            y += 0.01;
        }
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        assert!(SyntheticSpec::new(vec![], vec![], 0.0, 0).is_err());
        assert!(SyntheticSpec::new(vec![1.0, 1.0], vec![0.5, 0.5], 0.0, 0).is_err());
        assert!(SyntheticSpec::new(vec![1.0, 2.0], vec![0.6, 0.6], 0.0, 0).is_err());
        // jitter at half the gap is too wide
        assert!(SyntheticSpec::new(vec![1.0, 2.0], vec![0.5, 0.5], 0.5, 0).is_err());
        assert!(SyntheticSpec::new(vec![1.0, 2.0], vec![0.5, 0.5], 0.49, 0).is_ok());
    }

    #[test]
    fn single_point_spec_never_fails() {
        let s = SyntheticSpec::new(vec![4.0], vec![1.0], 0.0, 3).unwrap();
        let report = pac_monte_carlo(&s, 20, 0.05, CertMode::Robust, 100).unwrap();
        assert_eq!(report.failures, 0);
    }

    #[test]
    fn draws_are_deterministic_per_repetition() {
        let s = SyntheticSpec::new(vec![1.0, 2.0], vec![0.5, 0.5], 0.2, 11).unwrap();
        let a = run_repetition(&s, 50, 0.05, CertMode::Robust, 7).unwrap();
        let b = run_repetition(&s, 50, 0.05, CertMode::Robust, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn consistency_conditions_on_worked_examples() {
        let values = SampleValues::from_values(vec![3.0, 5.0, 9.0]).unwrap();
        // rho = 0.5 leaves the objective flat on [3, 5]; the smallest
        // minimizer is y* = 3, so values <= 3 are the covered ones.
        let base = scenario::solve_relaxed(&values, 0.5).unwrap();
        assert_eq!(base.y_star, 3.0);

        let extra_ok = SampleValues::from_values(vec![2.0, 3.0]).unwrap();
        let r = consistency_check(&values, &extra_ok, 0.5).unwrap();
        assert!(r.permutation_invariant);
        assert_eq!(r.confirmation_holds, Some(true));
        assert_eq!(r.responsiveness_holds, None);

        // [4, 2] contains an uncovered value, so responsiveness applies.
        let extra_mixed = SampleValues::from_values(vec![4.0, 2.0]).unwrap();
        let r = consistency_check(&values, &extra_mixed, 0.5).unwrap();
        assert_eq!(r.confirmation_holds, None);
        assert_eq!(r.responsiveness_holds, Some(true));

        let extra_bad = SampleValues::from_values(vec![11.0]).unwrap();
        let r = consistency_check(&values, &extra_bad, 0.5).unwrap();
        assert_eq!(r.responsiveness_holds, Some(true));
        assert!(r.all_hold());
    }
}
