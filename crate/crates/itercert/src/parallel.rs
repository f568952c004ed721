//! Thread-pooled drivers around the core's pure per-item operations.
//!
//! Work is split into fixed-size candidate blocks evaluated in parallel
//! and consumed in index order, so every output is byte-identical to the
//! serial core driver regardless of worker count.

use itercert_core::mpc::{
    self, Dataset, DatasetRecord, LtiMpcConfig, MetricRow, MpcError, SolverSettings,
};
use itercert_core::validation::{
    self, CertMode, CoverageReport, SyntheticSpec, ValidationError,
};
use rayon::prelude::*;
use rayon::ThreadPool;

const CANDIDATE_BLOCK: u64 = 256;

fn pool(threads: usize) -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction")
}

/// Parallel rejection sampling; equivalent to
/// [`itercert_core::mpc::sample_dataset`] for every worker count.
pub fn generate_dataset(
    config: &LtiMpcConfig,
    settings: &SolverSettings,
    n_samples: usize,
    seed: u64,
    threads: usize,
) -> Result<Dataset, MpcError> {
    if n_samples == 0 {
        return Err(MpcError::EmptyInput { what: "n_samples" });
    }
    config.validate()?;
    settings.validate()?;
    let workers = pool(threads);
    let mut records: Vec<DatasetRecord> = Vec::with_capacity(n_samples);
    let mut base = 0u64;
    'blocks: loop {
        let outcomes: Result<Vec<_>, MpcError> = workers.install(|| {
            (base..base + CANDIDATE_BLOCK)
                .into_par_iter()
                .map(|idx| mpc::evaluate_candidate(config, settings, seed, idx))
                .collect()
        });
        for outcome in outcomes? {
            // mirror the serial driver: consume candidates in index order
            // and stop at the n-th acceptance
            if outcome.accepted() {
                records.push(DatasetRecord {
                    sample_id: records.len() as u64,
                    candidate_index: outcome.candidate_index,
                    x0: outcome.x0,
                    iterations: outcome.iterations,
                    status: outcome.status,
                });
                if records.len() == n_samples {
                    break 'blocks;
                }
            }
            let examined = outcome.candidate_index + 1;
            if mpc::acceptance_rate_too_low(examined, records.len() as u64) {
                return Err(MpcError::AcceptanceRateTooLow {
                    examined,
                    accepted: records.len() as u64,
                });
            }
        }
        base += CANDIDATE_BLOCK;
    }
    Ok(Dataset { records, config_hash: mpc::config_digest(config, settings), seed })
}

/// Parallel metric tracing over dataset records; row order is
/// `(sample_id, k)` ascending, independent of worker count.
pub fn record_metrics(
    config: &LtiMpcConfig,
    settings: &SolverSettings,
    records: &[DatasetRecord],
    budgets: &[u32],
    threads: usize,
) -> Result<Vec<MetricRow>, MpcError> {
    if budgets.is_empty() {
        return Err(MpcError::EmptyInput { what: "budgets" });
    }
    let workers = pool(threads);
    let traces: Result<Vec<_>, MpcError> = workers.install(|| {
        records
            .par_iter()
            .map(|r| {
                mpc::sample_metric_trace(config, settings, r.x0, budgets)
                    .map(|t| (r.sample_id, t))
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(records.len() * budgets.len());
    for (sample_id, trace) in traces? {
        for (k, phi) in trace {
            rows.push(MetricRow { sample_id, k, phi });
        }
    }
    Ok(rows)
}

/// Parallel Monte-Carlo coverage; failure counting is an order-independent
/// reduction, so the report matches the serial driver exactly.
pub fn pac_monte_carlo(
    spec: &SyntheticSpec,
    n_samples: usize,
    beta: f64,
    mode: CertMode,
    repetitions: usize,
    threads: usize,
) -> Result<CoverageReport, ValidationError> {
    if repetitions < 100 {
        return Err(ValidationError::TooFewRepetitions { repetitions });
    }
    let workers = pool(threads);
    let outcomes: Result<Vec<bool>, ValidationError> = workers.install(|| {
        (0..repetitions as u64)
            .into_par_iter()
            .map(|rep| validation::run_repetition(spec, n_samples, beta, mode, rep))
            .collect()
    });
    let failures = outcomes?.into_iter().filter(|&f| f).count();
    Ok(validation::coverage_report(repetitions, failures, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_dataset_matches_serial_for_any_worker_count() {
        let config = LtiMpcConfig::default();
        let settings = SolverSettings::default();
        let serial = mpc::sample_dataset(&config, &settings, 6, 13).unwrap();
        for threads in [1usize, 4, 8] {
            let par = generate_dataset(&config, &settings, 6, 13, threads).unwrap();
            assert_eq!(par, serial, "threads = {threads}");
        }
    }

    #[test]
    fn parallel_coverage_matches_serial() {
        let spec =
            SyntheticSpec::new(vec![1.0, 3.0, 9.0], vec![0.5, 0.3, 0.2], 0.4, 21).unwrap();
        let serial =
            validation::pac_monte_carlo(&spec, 40, 0.05, CertMode::Robust, 120).unwrap();
        for threads in [1usize, 3] {
            let par = pac_monte_carlo(&spec, 40, 0.05, CertMode::Robust, 120, threads).unwrap();
            assert_eq!(par, serial);
        }
    }
}
