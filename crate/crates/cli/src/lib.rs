//! Benchmark harness for the qiga engine: experiment specs, the IDX dataset
//! loader, seeded GA/QIGA/D-QIGA sweeps, and table-shaped CSV reporting.

pub mod idx;
pub mod report;
pub mod runner;
pub mod spec;

pub use report::{aggregate, collect_runs, timing_stats, write_report, TimingSummary};
pub use runner::{build_problem, compute_oracle, run_experiment, RunSummary};
pub use spec::{Algorithm, ExperimentSpec, ProblemSpec};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "QIGA_BENCH_OUT";

/// Environment variable pointing at a directory with MNIST-format IDX files.
pub const MNIST_ENV: &str = "QIGA_MNIST_DIR";
