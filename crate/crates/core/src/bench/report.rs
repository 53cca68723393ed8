use std::fmt::Write;

use super::config::OutputFormat;

pub const CSV_HEADER: &str = "kernel,device,mean_ms,copy_in_ms,kernel_ms,copy_out_ms,speedup";

/// Means for one kernel on one device, in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelStats {
    pub kernel: String,
    pub device: String,
    pub mean_ms: f64,
    pub copy_in_ms: f64,
    pub kernel_ms: f64,
    pub copy_out_ms: f64,
    /// Serial mean over this mean; `None` without a serial row for the kernel.
    pub speedup: Option<f64>,
    /// The per-iteration totals behind `mean_ms`.
    pub samples_ms: Vec<f64>,
}

impl KernelStats {
    pub fn copy_ms(&self) -> f64 {
        self.copy_in_ms + self.copy_out_ms
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<KernelStats>,
    /// Parameter fingerprint after the run, per device label.
    pub fingerprints: Vec<(String, u64)>,
}

impl BenchReport {
    /// Builds a report and fills in every row's speedup against the
    /// `serial` row of the same kernel.
    pub fn new(mut rows: Vec<KernelStats>, fingerprints: Vec<(String, u64)>) -> Self {
        let baselines: Vec<(String, f64)> = rows
            .iter()
            .filter(|r| r.device == "serial")
            .map(|r| (r.kernel.clone(), r.mean_ms))
            .collect();
        for row in &mut rows {
            row.speedup = if row.device == "serial" {
                Some(1.0)
            } else {
                baselines
                    .iter()
                    .find(|(k, _)| *k == row.kernel)
                    .map(|(_, base)| base / row.mean_ms)
            };
        }
        Self { rows, fingerprints }
    }

    pub fn row(&self, kernel: &str, device: &str) -> Option<&KernelStats> {
        self.rows.iter().find(|r| r.kernel == kernel && r.device == device)
    }
}

fn cells(row: &KernelStats) -> [String; 7] {
    [
        row.kernel.clone(),
        row.device.clone(),
        format!("{:.3}", row.mean_ms),
        format!("{:.3}", row.copy_in_ms),
        format!("{:.3}", row.kernel_ms),
        format!("{:.3}", row.copy_out_ms),
        row.speedup.map(|s| format!("{s:.3}")).unwrap_or_default(),
    ]
}

pub fn emit_report(report: &BenchReport, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in &report.rows {
                out.push_str(&cells(row).join(","));
                out.push('\n');
            }
        }
        OutputFormat::Md => {
            let header: Vec<&str> = CSV_HEADER.split(',').collect();
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for row in &report.rows {
                let _ = writeln!(out, "| {} |", cells(row).join(" | "));
            }
        }
    }
    out
}
