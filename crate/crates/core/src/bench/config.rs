use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::runtime::DeviceKind;

/// Samples generated when no dataset file is given, before enlargement.
pub const SYNTHETIC_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Md,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "md" => Ok(OutputFormat::Md),
            other => Err(Error::Config(format!("unknown format `{other}`, expected csv or md"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Synthetic uniform data when absent.
    pub dataset: Option<PathBuf>,
    pub features: usize,
    pub classes: usize,
    pub fc_neurons: usize,
    pub eta: f32,
    pub warmup_iters: usize,
    pub timed_iters: usize,
    pub enlarge_factor: usize,
    /// The serial baseline always runs; `ParallelHost` adds a second device.
    pub device: DeviceKind,
    /// Parallel worker count, the logical core count when absent.
    pub workers: Option<usize>,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            features: 340,
            classes: 10,
            fc_neurons: 100_000,
            eta: 0.01,
            warmup_iters: 10_000,
            timed_iters: 10,
            enlarge_factor: 1,
            device: DeviceKind::SerialHost,
            workers: None,
            seed: 42,
            format: OutputFormat::Csv,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.timed_iters == 0 {
            return fail("--iters must be at least 1");
        }
        if self.features == 0 {
            return fail("--features must be at least 1");
        }
        if self.classes < 2 {
            return fail("--classes must be at least 2");
        }
        if self.fc_neurons == 0 {
            return fail("--fc-neurons must be at least 1");
        }
        if self.enlarge_factor == 0 {
            return fail("--enlarge must be at least 1");
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return fail("--eta must be a positive number");
        }
        if self.workers == Some(0) {
            return fail("--workers must be at least 1");
        }
        Ok(())
    }
}
