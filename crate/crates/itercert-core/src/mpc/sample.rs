//! Rejection sampling over the initial-state box.
//!
//! Candidates are drawn uniformly, one deterministic ChaCha substream per
//! candidate index, and solved; instances the solver certifies infeasible
//! (or fails to converge on) are rejected. The dataset keeps the first
//! `n_samples` accepted candidates in candidate order, so the result is
//! independent of evaluation order and thread count.

use alloc::string::String;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use super::admm::{admm_run, SolverSettings};
use super::{build_qp, LtiMpcConfig, MpcError, SolveStatus};
use crate::rng::SubstreamRng;

/// One accepted sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetRecord {
    /// Position in the accepted sequence (0-based).
    pub sample_id: u64,
    /// Index of the candidate draw that produced this sample.
    pub candidate_index: u64,
    /// Sampled initial state.
    pub x0: [f64; 2],
    /// Recorded iteration count `n(x)`.
    pub iterations: u32,
    /// Solver verdict (always `Solved` for accepted records).
    pub status: SolveStatus,
}

/// Accepted samples plus the provenance needed to reproduce them.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    /// Accepted records in candidate order.
    pub records: Vec<DatasetRecord>,
    /// Digest binding the records to their config and solver settings.
    pub config_hash: String,
    /// Seed the candidates were drawn from.
    pub seed: u64,
}

/// Outcome of solving one candidate, accepted or not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateOutcome {
    /// Candidate index the draw came from.
    pub candidate_index: u64,
    /// Drawn initial state.
    pub x0: [f64; 2],
    /// Solver verdict.
    pub status: SolveStatus,
    /// Iterations at the verdict.
    pub iterations: u32,
}

impl CandidateOutcome {
    /// Accepted means the instance solved within tolerance.
    pub fn accepted(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

/// Uniform draw from the sampling box for candidate `candidate_index`.
pub fn draw_initial_state(config: &LtiMpcConfig, seed: u64, candidate_index: u64) -> [f64; 2] {
    let mut rng = SubstreamRng::new(seed, candidate_index);
    let b = &config.sampling_box;
    [rng.next_range(b[0][0], b[0][1]), rng.next_range(b[1][0], b[1][1])]
}

/// Draws and solves candidate `candidate_index`; pure and deterministic, so
/// drivers may evaluate candidates in any order or in parallel.
pub fn evaluate_candidate(
    config: &LtiMpcConfig,
    settings: &SolverSettings,
    seed: u64,
    candidate_index: u64,
) -> Result<CandidateOutcome, MpcError> {
    let x0 = draw_initial_state(config, seed, candidate_index);
    let qp = build_qp(config, x0)?;
    let state = admm_run(&qp, settings, &[])?;
    Ok(CandidateOutcome { candidate_index, x0, status: state.status, iterations: state.iterations })
}

/// Acceptance-rate abort rule: below 1e-3 once 1e6 candidates were examined.
/// Exposed so external drivers replicate the serial driver's abort behavior.
pub fn acceptance_rate_too_low(examined: u64, accepted: u64) -> bool {
    examined >= 1_000_000 && (accepted as f64) < 1e-3 * examined as f64
}

/// Serial rejection-sampling driver: keeps the first `n_samples` accepted
/// candidates in candidate order.
pub fn sample_dataset(
    config: &LtiMpcConfig,
    settings: &SolverSettings,
    n_samples: usize,
    seed: u64,
) -> Result<Dataset, MpcError> {
    if n_samples == 0 {
        return Err(MpcError::EmptyInput { what: "n_samples" });
    }
    config.validate()?;
    settings.validate()?;
    let mut records = Vec::with_capacity(n_samples);
    let mut candidate_index = 0u64;
    while records.len() < n_samples {
        let outcome = evaluate_candidate(config, settings, seed, candidate_index)?;
        if outcome.accepted() {
            records.push(DatasetRecord {
                sample_id: records.len() as u64,
                candidate_index,
                x0: outcome.x0,
                iterations: outcome.iterations,
                status: outcome.status,
            });
        }
        candidate_index += 1;
        if acceptance_rate_too_low(candidate_index, records.len() as u64) {
            return Err(MpcError::AcceptanceRateTooLow {
                examined: candidate_index,
                accepted: records.len() as u64,
            });
        }
    }
    Ok(Dataset { records, config_hash: config_digest(config, settings), seed })
}

/// SHA-256 digest of a canonical rendering of the config and settings;
/// ties datasets and metric traces to the exact pipeline that produced them.
pub fn config_digest(config: &LtiMpcConfig, settings: &SolverSettings) -> String {
    let mut canon = String::new();
    let mut push_f64 = |label: &str, v: f64| {
        canon.push_str(label);
        canon.push('=');
        push_float(&mut canon, v);
        canon.push(';');
    };
    for (i, row) in config.a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            push_f64(&alloc::format!("a{i}{j}"), v);
        }
    }
    push_f64("b0", config.b[0]);
    push_f64("b1", config.b[1]);
    push_f64("state_bound", config.state_bound);
    push_f64("input_bound", config.input_bound);
    for (i, c) in config.sampling_box.iter().enumerate() {
        push_f64(&alloc::format!("box{i}lo"), c[0]);
        push_f64(&alloc::format!("box{i}hi"), c[1]);
    }
    push_f64("penalty", settings.penalty);
    push_f64("alpha", settings.relaxation_alpha);
    push_f64("abs_tol", settings.abs_tol);
    push_f64("rel_tol", settings.rel_tol);
    canon.push_str(&alloc::format!(
        "T={};terminal={:?};max_iter={};check={};",
        config.horizon_t,
        config.terminal,
        settings.max_iterations,
        settings.check_interval
    ));

    let digest = Sha256::digest(canon.as_bytes());
    let mut hex = String::with_capacity(7 + 64);
    hex.push_str("sha256:");
    for byte in digest {
        let hi = b"0123456789abcdef"[(byte >> 4) as usize];
        let lo = b"0123456789abcdef"[(byte & 0xf) as usize];
        hex.push(hi as char);
        hex.push(lo as char);
    }
    hex
}

fn push_float(out: &mut String, v: f64) {
    // exact bit rendering keeps the digest canonical
    out.push_str(&alloc::format!("{:016x}", v.to_bits()));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_stay_inside_the_box_and_replay() {
        let config = LtiMpcConfig::default();
        for idx in [0u64, 1, 99] {
            let a = draw_initial_state(&config, 42, idx);
            let b = draw_initial_state(&config, 42, idx);
            assert_eq!(a, b);
            assert!(a[0] >= -10.0 && a[0] < 10.0);
            assert!(a[1] >= -10.0 && a[1] < 10.0);
        }
        assert_ne!(draw_initial_state(&config, 42, 0), draw_initial_state(&config, 43, 0));
    }

    #[test]
    fn small_dataset_is_all_solved_and_reproducible() {
        let config = LtiMpcConfig::default();
        let settings = SolverSettings::default();
        let a = sample_dataset(&config, &settings, 5, 7).unwrap();
        let b = sample_dataset(&config, &settings, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 5);
        for (i, r) in a.records.iter().enumerate() {
            assert_eq!(r.status, SolveStatus::Solved);
            assert_eq!(r.sample_id, i as u64);
            assert!(r.iterations >= 1);
        }
        // candidate order is strictly increasing
        for w in a.records.windows(2) {
            assert!(w[0].candidate_index < w[1].candidate_index);
        }
    }

    #[test]
    fn digest_depends_on_config_and_settings() {
        let config = LtiMpcConfig::default();
        let settings = SolverSettings::default();
        let d0 = config_digest(&config, &settings);
        let tighter = SolverSettings { abs_tol: 1e-4, ..settings };
        assert_ne!(d0, config_digest(&config, &tighter));
        let wider = LtiMpcConfig { state_bound: 11.0, ..config };
        assert_ne!(d0, config_digest(&wider, &settings));
    }

    #[test]
    fn abort_rule_boundary() {
        assert!(!acceptance_rate_too_low(999_999, 0));
        assert!(acceptance_rate_too_low(1_000_000, 999));
        assert!(!acceptance_rate_too_low(1_000_000, 1000));
    }
}
