//! Performance-metric traces: distance of truncated-iteration solutions to
//! the converged one, per sample and per iteration budget.

use alloc::vec::Vec;

use super::admm::{admm_solve, reference_solution, SolverSettings};
use super::sample::Dataset;
use super::{build_qp, LtiMpcConfig, MpcError, SolveStatus};
use crate::math;

/// One long-format metric row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricRow {
    /// Sample the row belongs to.
    pub sample_id: u64,
    /// Iteration budget the iterate was taken at.
    pub k: u32,
    /// Metric value `phi(z^k, z*)`.
    pub phi: f64,
}

/// Mean Euclidean distance between predicted states of stages `1..=T`
/// (stage 0 is pinned to the measured state; inputs are excluded).
pub fn phi_metric(z_k: &[f64], z_star: &[f64], horizon_t: usize) -> Result<f64, MpcError> {
    let expected = 3 * horizon_t + 2;
    if z_k.len() != expected || z_star.len() != expected {
        return Err(MpcError::LayoutMismatch { expected, got: (z_k.len(), z_star.len()) });
    }
    let mut total = 0.0;
    for i in 1..=horizon_t {
        let dx0 = z_k[2 * i] - z_star[2 * i];
        let dx1 = z_k[2 * i + 1] - z_star[2 * i + 1];
        total += math::sqrt(dx0 * dx0 + dx1 * dx1);
    }
    Ok(total / horizon_t as f64)
}

/// Metric trace for one initial state: re-solves with snapshots at each
/// budget and measures every snapshot against the high-accuracy solution.
/// Returned pairs are `(k, phi)` in ascending `k`.
pub fn sample_metric_trace(
    config: &LtiMpcConfig,
    settings: &SolverSettings,
    x0: [f64; 2],
    budgets: &[u32],
) -> Result<Vec<(u32, f64)>, MpcError> {
    if budgets.is_empty() {
        return Err(MpcError::EmptyInput { what: "budgets" });
    }
    let qp = build_qp(config, x0)?;
    let report = admm_solve(&qp, settings, budgets)?;
    if report.status != SolveStatus::Solved {
        return Err(MpcError::Infeasible { status: report.status });
    }
    let z_star = reference_solution(&qp)?;
    let mut sorted = budgets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len());
    for k in sorted {
        let z_k = report
            .snapshots
            .get(&k)
            .expect("solver records every requested snapshot");
        out.push((k, phi_metric(z_k, &z_star, config.horizon_t)?));
    }
    Ok(out)
}

/// Long-format metric table over every record of a dataset, ordered by
/// `(sample_id, k)`.
pub fn record_metrics(
    config: &LtiMpcConfig,
    settings: &SolverSettings,
    dataset: &Dataset,
    budgets: &[u32],
) -> Result<Vec<MetricRow>, MpcError> {
    if budgets.is_empty() {
        return Err(MpcError::EmptyInput { what: "budgets" });
    }
    let mut rows = Vec::with_capacity(dataset.records.len() * budgets.len());
    for record in &dataset.records {
        let trace = sample_metric_trace(config, settings, record.x0, budgets)?;
        for (k, phi) in trace {
            rows.push(MetricRow { sample_id: record.sample_id, k, phi });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpc::sample::sample_dataset;
    use alloc::vec;

    #[test]
    fn phi_is_zero_at_the_anchor_and_mean_of_unit_offsets() {
        let t = 3usize;
        let len = 3 * t + 2;
        let z_star: Vec<f64> = (0..len).map(|i| i as f64 * 0.1).collect();
        assert_eq!(phi_metric(&z_star, &z_star, t).unwrap(), 0.0);

        // offset every predicted state (stages 1..=T) by distance 1
        let mut z_k = z_star.clone();
        for i in 1..=t {
            z_k[2 * i] += 1.0;
        }
        assert!((phi_metric(&z_k, &z_star, t).unwrap() - 1.0).abs() < 1e-15);

        // stage-0 and input perturbations are invisible to the metric
        let mut z0 = z_star.clone();
        z0[0] += 5.0;
        z0[len - 1] += 5.0;
        assert_eq!(phi_metric(&z0, &z_star, t).unwrap(), 0.0);

        assert!(matches!(
            phi_metric(&z_k[..len - 1], &z_star, t),
            Err(MpcError::LayoutMismatch { .. })
        ));
    }

    #[test]
    fn traces_settle_once_converged() {
        let config = LtiMpcConfig::default();
        let settings = SolverSettings::default();
        let dataset = sample_dataset(&config, &settings, 2, 11).unwrap();
        let record = &dataset.records[0];
        let n = record.iterations;
        let trace =
            sample_metric_trace(&config, &settings, record.x0, &[1, 5, n, n + 10, n + 500])
                .unwrap();
        let phi_at = |k: u32| trace.iter().find(|(kk, _)| *kk == k).unwrap().1;
        // past termination the iterate is frozen
        assert!(phi_at(n + 10) <= phi_at(n) + 1e-9);
        assert!(phi_at(n + 500) <= phi_at(n) + 1e-9);
        // At convergence the metric is small on the scale of the tolerance;
        // the factor allows for the residual-to-distance conditioning.
        assert!(phi_at(n) <= 1e3 * settings.abs_tol, "phi at convergence {}", phi_at(n));
    }

    #[test]
    fn record_metrics_emits_one_row_per_sample_and_budget() {
        let config = LtiMpcConfig::default();
        let settings = SolverSettings::default();
        let dataset = sample_dataset(&config, &settings, 3, 5).unwrap();
        let rows = record_metrics(&config, &settings, &dataset, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(rows.len(), 15);
        let mut expected = vec![];
        for sid in 0..3u64 {
            for k in 1..=5u32 {
                expected.push((sid, k));
            }
        }
        let got: Vec<(u64, u32)> = rows.iter().map(|r| (r.sample_id, r.k)).collect();
        assert_eq!(got, expected);
        for r in &rows {
            assert!(r.phi.is_finite() && r.phi >= 0.0);
        }
    }
}
