//! JSON input schemas (serde) and hand-assembled result JSON.
//!
//! Results are assembled by hand so every double is rendered at 17
//! significant digits; `serde_json` would emit shortest-round-trip forms.

use std::fs;
use std::path::Path;

use itercert_core::bounds::{EpsilonInterval, EpsilonResult};
use itercert_core::mpc::{LtiMpcConfig, SolverSettings, Terminal};
use itercert_core::scenario::{RelaxedSolution, RobustSolution};
use itercert_core::validation::{CoverageReport, SyntheticSpec, ValidationError};
use serde::Deserialize;
use thiserror::Error;

use crate::format::fmt_f64;

/// JSON input problems.
#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        #[source]
        source: ValidationError,
    },
}

fn default_a() -> [[f64; 2]; 2] {
    LtiMpcConfig::default().a
}
fn default_b() -> [[f64; 1]; 2] {
    let b = LtiMpcConfig::default().b;
    [[b[0]], [b[1]]]
}
fn default_t() -> usize {
    LtiMpcConfig::default().horizon_t
}
fn default_state_bound() -> f64 {
    LtiMpcConfig::default().state_bound
}
fn default_input_bound() -> f64 {
    LtiMpcConfig::default().input_bound
}
fn default_box() -> [[f64; 2]; 2] {
    LtiMpcConfig::default().sampling_box
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SolverSection {
    penalty: f64,
    relaxation_alpha: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_iterations: u32,
    check_interval: u32,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            penalty: s.penalty,
            relaxation_alpha: s.relaxation_alpha,
            abs_tol: s.abs_tol,
            rel_tol: s.rel_tol,
            max_iterations: s.max_iterations,
            check_interval: s.check_interval,
        }
    }
}

/// On-disk pipeline configuration; every field has the documented default.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfigFile {
    #[serde(rename = "A", default = "default_a")]
    a: [[f64; 2]; 2],
    #[serde(rename = "B", default = "default_b")]
    b: [[f64; 1]; 2],
    #[serde(rename = "T", default = "default_t")]
    horizon_t: usize,
    #[serde(default = "default_state_bound")]
    state_bound: f64,
    #[serde(default = "default_input_bound")]
    input_bound: f64,
    #[serde(default = "default_box")]
    sampling_box: [[f64; 2]; 2],
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    seed: u64,
}

impl PipelineConfigFile {
    /// Splits into the core config/settings pair plus the file's seed.
    pub fn into_parts(self) -> (LtiMpcConfig, SolverSettings, u64) {
        let config = LtiMpcConfig {
            a: self.a,
            b: [self.b[0][0], self.b[1][0]],
            horizon_t: self.horizon_t,
            state_bound: self.state_bound,
            input_bound: self.input_bound,
            terminal: Terminal::Origin,
            sampling_box: self.sampling_box,
        };
        let settings = SolverSettings {
            penalty: self.solver.penalty,
            relaxation_alpha: self.solver.relaxation_alpha,
            abs_tol: self.solver.abs_tol,
            rel_tol: self.solver.rel_tol,
            max_iterations: self.solver.max_iterations,
            check_interval: self.solver.check_interval,
            seed: self.seed,
        };
        (config, settings, self.seed)
    }
}

/// Reads a pipeline config JSON.
pub fn read_pipeline_config(path: &Path) -> Result<PipelineConfigFile, JsonError> {
    let text = fs::read_to_string(path)
        .map_err(|source| JsonError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|source| JsonError::Parse { path: path.display().to_string(), source })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    support: Vec<f64>,
    probabilities: Vec<f64>,
    #[serde(default)]
    jitter: f64,
    #[serde(default)]
    seed: u64,
}

/// Reads a synthetic-distribution spec JSON; `seed_override` (from the CLI)
/// wins over the file's seed.
pub fn read_synthetic_spec(
    path: &Path,
    seed_override: Option<u64>,
) -> Result<SyntheticSpec, JsonError> {
    let text = fs::read_to_string(path)
        .map_err(|source| JsonError::Io { path: path.display().to_string(), source })?;
    let raw: SpecFile = serde_json::from_str(&text)
        .map_err(|source| JsonError::Parse { path: path.display().to_string(), source })?;
    SyntheticSpec::new(
        raw.support,
        raw.probabilities,
        raw.jitter,
        seed_override.unwrap_or(raw.seed),
    )
    .map_err(|source| JsonError::Invalid { path: path.display().to_string(), source })
}

/// A `key: value` JSON field with a preformatted value.
fn field(out: &mut String, key: &str, value: String, first: &mut bool) {
    if !*first {
        out.push_str(", ");
    }
    *first = false;
    out.push_str(&format!("\"{key}\": {value}"));
}

/// One-sided bound result as a JSON object.
pub fn epsilon_result_json(n: usize, beta: f64, q_or_d: usize, r: &EpsilonResult) -> String {
    let mut out = String::from("{");
    let mut first = true;
    field(&mut out, "method", format!("\"{}\"", r.method.name()), &mut first);
    field(&mut out, "n", n.to_string(), &mut first);
    field(&mut out, "beta", fmt_f64(beta), &mut first);
    field(&mut out, "q_or_d", q_or_d.to_string(), &mut first);
    field(&mut out, "epsilon", fmt_f64(r.epsilon), &mut first);
    if let Some(t) = r.root_t {
        field(&mut out, "root_t", fmt_f64(t), &mut first);
    }
    field(&mut out, "residual", fmt_f64(r.residual), &mut first);
    out.push('}');
    out
}

/// Two-sided bound result as a JSON object; `epsilon` carries the usable
/// upper bound.
pub fn epsilon_interval_json(n: usize, beta: f64, q: usize, iv: &EpsilonInterval) -> String {
    let mut out = String::from("{");
    let mut first = true;
    field(&mut out, "method", "\"interval\"".to_string(), &mut first);
    field(&mut out, "n", n.to_string(), &mut first);
    field(&mut out, "beta", fmt_f64(beta), &mut first);
    field(&mut out, "q_or_d", q.to_string(), &mut first);
    field(&mut out, "epsilon", fmt_f64(iv.epsilon_upper), &mut first);
    field(&mut out, "epsilon_lower", fmt_f64(iv.epsilon_lower), &mut first);
    field(&mut out, "epsilon_upper", fmt_f64(iv.epsilon_upper), &mut first);
    field(&mut out, "root_t", fmt_f64(iv.root_t_lower), &mut first);
    field(&mut out, "root_t_upper", fmt_f64(iv.root_t_upper), &mut first);
    field(
        &mut out,
        "residual",
        fmt_f64(iv.residual_lower.max(iv.residual_upper)),
        &mut first,
    );
    out.push('}');
    out
}

/// Robust solution + certificate.
pub fn robust_json(n: usize, beta: f64, sol: &RobustSolution, eps: &EpsilonResult) -> String {
    format!(
        "{{\"solution\": {{\"y_star\": {}, \"argmax_id\": {}}}, \"certificate\": {}}}",
        fmt_f64(sol.y_star),
        sol.argmax_id,
        epsilon_result_json(n, beta, 1, eps)
    )
}

/// Relaxed solution + certificate (+ warnings when the interval family was
/// used on accumulating data or fell back to the vacuous interval).
pub fn relaxed_json(
    n: usize,
    beta: f64,
    sol: &RelaxedSolution,
    certificate: String,
    warnings: Option<String>,
) -> String {
    let mut out = format!(
        "{{\"solution\": {{\"y_star\": {}, \"rho\": {}, \"q_star\": {}, \"s_star\": {}, \"objective\": {}}}, \"n\": {n}, \"beta\": {}, \"certificate\": {certificate}",
        fmt_f64(sol.y_star),
        fmt_f64(sol.rho),
        sol.q_star,
        sol.s_star,
        fmt_f64(sol.objective),
        fmt_f64(beta),
    );
    if let Some(w) = warnings {
        out.push_str(&format!(", \"warnings\": {w}"));
    }
    out.push('}');
    out
}

/// Coverage report as JSON.
pub fn coverage_json(mode: &str, n: usize, report: &CoverageReport) -> String {
    format!(
        "{{\"mode\": \"{mode}\", \"n\": {n}, \"repetitions\": {}, \"failures\": {}, \"failure_rate\": {}, \"beta\": {}, \"binomial_3sigma\": {}}}",
        report.repetitions,
        report.failures,
        fmt_f64(report.failure_rate),
        fmt_f64(report.beta),
        fmt_f64(report.binomial_3sigma),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn minimal_config_uses_documented_defaults() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, "{}").unwrap();
        let (config, settings, seed) = read_pipeline_config(&path).unwrap().into_parts();
        assert_eq!(config, LtiMpcConfig::default());
        assert_eq!(settings.penalty, SolverSettings::default().penalty);
        assert_eq!(seed, 0);
    }

    #[test]
    fn full_config_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(
            &path,
            r#"{"A": [[1.5, 1.0], [0.0, 1.0]], "B": [[1.5], [1.0]], "T": 10,
                "state_bound": 10.0, "input_bound": 5.0,
                "sampling_box": [[-10.0, 10.0], [-10.0, 10.0]],
                "solver": {"abs_tol": 1e-4}, "seed": 7}"#,
        )
        .unwrap();
        let (config, settings, seed) = read_pipeline_config(&path).unwrap().into_parts();
        assert_eq!(config.b, [1.5, 1.0]);
        assert_eq!(settings.abs_tol, 1e-4);
        assert_eq!(settings.rel_tol, SolverSettings::default().rel_tol);
        assert_eq!(seed, 7);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"horizon": 3}"#).unwrap();
        assert!(read_pipeline_config(&path).is_err());
    }

    #[test]
    fn result_json_parses_as_json() {
        let r = itercert_core::bounds::testset_epsilon(100, 0.05, 3).unwrap();
        let text = epsilon_result_json(100, 0.05, 3, &r);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["method"], "testset");
        assert_eq!(v["n"], 100);
        assert!(v["epsilon"].as_f64().unwrap() > 0.0);
    }
}
