use std::process::Command;

use lanenet::bench::{emit_report, run_benchmark, BenchConfig, OutputFormat, CSV_HEADER, FC_BACKWARD, SOFTMAX_BACKWARD};
use lanenet::data::DataSet;
use lanenet::runtime::DeviceKind;
use lanenet::tensor::SeededRng;

fn tiny(device: DeviceKind) -> BenchConfig {
    BenchConfig {
        features: 4,
        classes: 3,
        fc_neurons: 8,
        warmup_iters: 0,
        timed_iters: 1,
        device,
        workers: Some(2),
        ..Default::default()
    }
}

#[test]
fn minimal_protocol() {
    let report = run_benchmark(&tiny(DeviceKind::SerialHost)).unwrap();
    assert_eq!(report.rows.len(), 2);
    for row in &report.rows {
        assert_eq!(row.samples_ms.len(), 1);
        assert_eq!(row.speedup, Some(1.0));
        assert!(row.mean_ms >= 0.0 && row.copy_in_ms >= 0.0 && row.kernel_ms >= 0.0 && row.copy_out_ms >= 0.0);
    }
    assert!(report.row(SOFTMAX_BACKWARD, "serial").is_some());
    assert!(report.row(FC_BACKWARD, "serial").is_some());
}

#[test]
fn means_are_arithmetic_means_of_samples() {
    let cfg = BenchConfig { warmup_iters: 3, timed_iters: 7, ..tiny(DeviceKind::ParallelHost) };
    let report = run_benchmark(&cfg).unwrap();
    assert_eq!(report.rows.len(), 4);
    for row in &report.rows {
        assert_eq!(row.samples_ms.len(), 7);
        assert_eq!(row.mean_ms, row.samples_ms.iter().sum::<f64>() / 7.0);
        let phases = row.copy_in_ms + row.kernel_ms + row.copy_out_ms;
        assert!((phases - row.mean_ms).abs() <= 1e-9 * row.mean_ms.max(1.0));
    }
    let parallel = report.row(FC_BACKWARD, "parallel").unwrap();
    let serial = report.row(FC_BACKWARD, "serial").unwrap();
    assert_eq!(parallel.speedup, Some(serial.mean_ms / parallel.mean_ms));
}

#[test]
fn both_devices_end_in_the_same_state() {
    let cfg = BenchConfig { warmup_iters: 20, timed_iters: 5, fc_neurons: 300, ..tiny(DeviceKind::ParallelHost) };
    let a = run_benchmark(&cfg).unwrap();
    let b = run_benchmark(&cfg).unwrap();
    assert_eq!(a.fingerprints.len(), 2);
    assert_eq!(a.fingerprints[0].1, a.fingerprints[1].1);
    assert_eq!(a.fingerprints, b.fingerprints);
}

#[test]
fn dataset_file_and_enlargement() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.txt");
    DataSet::<f32>::synthetic(4, 3, 10, &mut SeededRng::new(1)).unwrap().save(&path).unwrap();
    let cfg = BenchConfig { dataset: Some(path), enlarge_factor: 3, warmup_iters: 40, ..tiny(DeviceKind::SerialHost) };
    let report = run_benchmark(&cfg).unwrap();
    assert_eq!(report.rows.len(), 2);

    let wrong_width = BenchConfig { features: 5, ..cfg };
    assert!(run_benchmark(&wrong_width).is_err());
}

#[test]
fn csv_report_shape() {
    let report = run_benchmark(&tiny(DeviceKind::ParallelHost)).unwrap();
    let csv = emit_report(&report, OutputFormat::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 7);
        for c in &cells[2..] {
            let (_, decimals) = c.split_once('.').unwrap();
            assert_eq!(decimals.len(), 3, "{line}");
        }
    }
}

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lanenet-bench"));
    c.env_remove("LANE_DEVICE").env_remove("LANE_WORKERS");
    c
}

const TINY: [&str; 10] = ["--features", "4", "--classes", "3", "--fc-neurons", "8", "--warmup", "2", "--iters", "2"];

#[test]
fn cli_writes_a_report() {
    let out = cli().args(TINY).args(["--device", "parallel", "--workers", "2"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn cli_reads_device_from_the_environment() {
    let out = cli().args(TINY).env("LANE_DEVICE", "parallel").env("LANE_WORKERS", "2").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains(",parallel,"));

    let out = cli().args(TINY).env("LANE_DEVICE", "fpga").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_markdown_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.md");
    let status = cli().args(TINY).args(["--format", "md", "--out"]).arg(&path).status().unwrap();
    assert!(status.success());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("| kernel | device |"));
}

#[test]
fn cli_exit_codes() {
    let code = |args: &[&str]| cli().args(TINY).args(args).output().unwrap().status.code();
    assert_eq!(code(&["--iters", "0"]), Some(2));
    assert_eq!(code(&["--device", "gpu"]), Some(2));
    assert_eq!(code(&["--workers", "0", "--device", "parallel"]), Some(2));
    assert_eq!(code(&["--format", "json"]), Some(2));
    assert_eq!(code(&["--eta", "0"]), Some(2));
    assert_eq!(code(&["--bogus"]), Some(2));
    assert_eq!(code(&["--dataset", "/no/such/file"]), Some(1));
}
