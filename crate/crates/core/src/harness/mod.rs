//! Seeded experiments: random channels, scatter runs against the
//! conjectured bounds and the verification suites.

pub mod config;
pub mod sampling;
pub mod scatter;
pub mod verify;

pub use config::{ExperimentConfig, SEED_ENV};
pub use sampling::{channel_at, sample_random_channel, sample_rng};
pub use scatter::{run_scatter, write_scatter_csv, GroupReport, ScatterOutput, ScatterRecord};
pub use verify::{run_verify, CheckResult, DualFn, Suite, VerifyOptions, VerifyReport};
