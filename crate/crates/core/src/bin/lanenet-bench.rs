use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lanenet::bench::{emit_report, run_benchmark, BenchConfig, OutputFormat};
use lanenet::runtime::DeviceKind;
use lanenet::{Error, Result};

/// Times the softmax and fully connected backward kernels on the serial host
/// and, optionally, the parallel host.
#[derive(Debug, Parser)]
#[command(name = "lanenet-bench", version)]
struct Args {
    /// Dataset file with comma-separated features followed by a one-hot label.
    /// Synthetic data is used when omitted.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 340)]
    features: usize,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long = "fc-neurons", default_value_t = 100_000)]
    fc_neurons: usize,
    #[arg(long, default_value_t = 0.01)]
    eta: f32,
    #[arg(long, default_value_t = 10_000)]
    warmup: usize,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    enlarge: usize,
    /// serial or parallel. Falls back to LANE_DEVICE, then serial.
    #[arg(long)]
    device: Option<String>,
    /// Parallel worker count. Falls back to LANE_WORKERS, then the core count.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// csv or md.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file, stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(args: &Args) -> Result<BenchConfig> {
    let device = match args.device.clone().or_else(|| std::env::var("LANE_DEVICE").ok()) {
        Some(s) => s.parse()?,
        None => DeviceKind::SerialHost,
    };
    let workers = match args.workers {
        Some(n) => Some(n),
        None => match std::env::var("LANE_WORKERS") {
            Ok(s) => Some(
                s.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("LANE_WORKERS `{s}` is not a worker count")))?,
            ),
            Err(_) => None,
        },
    };
    let format: OutputFormat = args.format.parse()?;
    Ok(BenchConfig {
        dataset: args.dataset.clone(),
        features: args.features,
        classes: args.classes,
        fc_neurons: args.fc_neurons,
        eta: args.eta,
        warmup_iters: args.warmup,
        timed_iters: args.iters,
        enlarge_factor: args.enlarge,
        device,
        workers,
        seed: args.seed,
        format,
    })
}

fn run(args: &Args) -> Result<()> {
    let cfg = config(args)?;
    let report = run_benchmark(&cfg)?;
    let text = emit_report(&report, cfg.format);
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lanenet-bench: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
