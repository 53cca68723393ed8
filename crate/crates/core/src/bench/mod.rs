//! Benchmark harness for the two backward kernels.
//!
//! Every iteration runs one forward pass, the output layer's backward
//! schedule, the hidden layer's backward schedule and the weight update. The
//! two `execute` calls are timed in full (copy-in, kernel, copy-out) and the
//! report gives per-invocation arithmetic means.

mod config;
mod report;
mod run;

pub use config::{BenchConfig, OutputFormat, SYNTHETIC_SAMPLES};
pub use report::{emit_report, BenchReport, KernelStats, CSV_HEADER};
pub use run::run_benchmark;

/// Kernel names as they appear in reports.
pub const SOFTMAX_BACKWARD: &str = "softmax_backward";
pub const FC_BACKWARD: &str = "fc_backward";
