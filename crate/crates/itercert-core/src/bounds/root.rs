//! Bracketed bisection over sign evaluations.
//!
//! The bound equations are solved on a log-domain sign test: the evaluator
//! returns an oriented delta (positive on the `sign_lo_positive` side of the
//! root) together with the residual metric reported to callers. Bisection
//! runs until the bracket is below the configured width *and* the residual
//! is below [`RESIDUAL_TARGET`], or until the bracket cannot shrink in
//! double precision.

use super::RootConfig;

/// Residual the solver drives toward; one order under the documented
/// `1e-10` guarantee to leave headroom for evaluation noise.
pub(super) const RESIDUAL_TARGET: f64 = 1e-11;

/// One evaluation of the defining equation at `t`.
#[derive(Clone, Copy, Debug)]
pub(super) struct SignEval {
    /// Oriented difference; only the sign steers bisection.
    pub delta: f64,
    /// Residual metric reported for this point.
    pub residual: f64,
}

pub(super) struct RootOutcome {
    pub t: f64,
    pub residual: f64,
    pub evaluations: u32,
}

/// Bisect `eval` on `[lo, hi]`.
///
/// `sign_lo_positive` states the delta sign on the `lo` side; endpoints are
/// never evaluated, so analytically known (possibly infinite-slope) endpoint
/// signs can be passed virtually. `seed_point` optionally carries an already
/// evaluated point inside the bracket, used as the initial best.
pub(super) fn bisect(
    mut eval: impl FnMut(f64) -> SignEval,
    mut lo: f64,
    mut hi: f64,
    sign_lo_positive: bool,
    seed_point: Option<(f64, SignEval)>,
    cfg: &RootConfig,
    budget: u32,
) -> RootOutcome {
    debug_assert!(lo < hi);
    let mut best: Option<(f64, f64)> = seed_point.map(|(t, e)| (t, e.residual));
    let mut evaluations = 0u32;

    while evaluations < budget {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break; // bracket no longer representable
        }
        let e = eval(mid);
        evaluations += 1;
        if best.map_or(true, |(_, r)| e.residual < r) {
            best = Some((mid, e.residual));
        }
        if e.delta == 0.0 {
            break;
        }
        if (e.delta > 0.0) == sign_lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        // For roots far below 1 the absolute width target alone would stop
        // with poor relative accuracy, so tighten it near zero.
        let width_target = cfg.abs_tolerance_t.min(mid.abs() * 1e-9);
        if hi - lo <= width_target && best.map_or(false, |(_, r)| r <= RESIDUAL_TARGET) {
            break;
        }
    }

    let (t, residual) = best.expect("bisection bracket admits at least one interior point");
    RootOutcome { t, residual, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_root_of_shifted_line() {
        let cfg = RootConfig::default();
        let out = bisect(
            |t| SignEval { delta: 0.3 - t, residual: (0.3 - t).abs() },
            0.0,
            1.0,
            true,
            None,
            &cfg,
            200,
        );
        assert!((out.t - 0.3).abs() < 1e-12, "root {} off", out.t);
        assert!(out.residual <= RESIDUAL_TARGET);
    }

    #[test]
    fn respects_reversed_orientation() {
        let cfg = RootConfig::default();
        let out = bisect(
            |t| SignEval { delta: t - 2.0, residual: (t - 2.0).abs() },
            1.0,
            3.0,
            false,
            None,
            &cfg,
            200,
        );
        assert!((out.t - 2.0).abs() < 1e-12);
    }
}
