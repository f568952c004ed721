//! IO, file formats, parallel drivers and the command-line surface for the
//! `itercert-core` toolkit.
//!
//! File formats (all floats rendered at 17 significant digits so files are
//! diff-able and re-parse bit-exactly):
//!
//! * samples CSV — `sample_id,value`; the dataset CSV below is also
//!   accepted wherever samples are read, with `n_iters` as the value.
//! * dataset CSV — `sample_id,x0_1,x0_2,n_iters`.
//! * metric-trace CSV — `sample_id,k,phi`.
//! * trade-off CSV — `control,y_value,q_star,s_star,epsilon,epsilon_lower,
//!   empirical_violation` (empty field where inapplicable).
//!
//! Every file written by the CLI gets a `<file>.manifest.json` sidecar
//! recording the command line, config digest, seed and toolkit version.

pub mod csvio;
pub mod format;
pub mod jsonio;
pub mod manifest;
pub mod parallel;
pub mod svg;

pub use itercert_core as core;
