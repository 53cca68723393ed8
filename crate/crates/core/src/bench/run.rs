use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::nn::LearningRate;
use crate::runtime::{Device, DeviceKind, PhaseTiming};
use crate::tensor::{SeededRng, Storage};
use crate::training::FeedForwardNetwork;

use super::config::{BenchConfig, SYNTHETIC_SAMPLES};
use super::report::{BenchReport, KernelStats};
use super::{FC_BACKWARD, SOFTMAX_BACKWARD};

/// Jitter applied to replicas when the dataset is enlarged.
const ENLARGE_NOISE: f64 = 0.01;

type Net = FeedForwardNetwork<f32>;

struct Bench {
    data: DataSet<f32>,
    eta: LearningRate<f32>,
    step: usize,
}

impl Bench {
    /// One forward/backward/update on the next sample in order.
    fn iterate(&mut self, net: &mut Net) -> Result<(PhaseTiming, PhaseTiming)> {
        let sample = &self.data.items()[self.step % self.data.len()];
        self.step += 1;
        net.forward(&sample.features)?;
        let timing = net.backward(&sample.label, self.eta)?;
        net.apply_updates();
        Ok((timing.output.total, timing.hidden[0].total))
    }
}

fn load_data(cfg: &BenchConfig) -> Result<DataSet<f32>> {
    let mut rng = SeededRng::new(cfg.seed.wrapping_add(1));
    let base = match &cfg.dataset {
        Some(path) => DataSet::load(path, cfg.features, cfg.classes)?,
        None => DataSet::synthetic(cfg.features, cfg.classes, SYNTHETIC_SAMPLES, &mut rng)?,
    };
    if base.is_empty() {
        return Err(Error::Config("dataset has no samples".into()));
    }
    if cfg.enlarge_factor > 1 {
        base.enlarge(cfg.enlarge_factor, ENLARGE_NOISE, &mut rng)
    } else {
        Ok(base)
    }
}

fn build(cfg: &BenchConfig, device: &Device) -> Result<Net> {
    let mut net = Net::build(cfg.features, &[cfg.fc_neurons], cfg.classes, &mut SeededRng::new(cfg.seed))?;
    net.bind(device);
    Ok(net)
}

/// Every buffer the backward pass and update touch, hidden layer first.
fn snapshot(net: &Net) -> Vec<Vec<f32>> {
    let h = &net.hidden()[0];
    let o = net.output();
    vec![
        h.deltas().read().as_slice().to_vec(),
        h.gradients().read().as_slice().to_vec(),
        h.delta_weights().read().as_slice().to_vec(),
        h.delta_biases().read().as_slice().to_vec(),
        h.weights().read().as_slice().to_vec(),
        h.biases().read().as_slice().to_vec(),
        o.deltas().read().as_slice().to_vec(),
        o.gradients().read().as_slice().to_vec(),
        o.delta_weights().read().as_slice().to_vec(),
        o.delta_biases().read().as_slice().to_vec(),
        o.weights().read().as_slice().to_vec(),
        o.biases().read().as_slice().to_vec(),
    ]
}

fn bitwise_equal(a: &[Vec<f32>], b: &[Vec<f32>]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits())
        })
}

fn stats(kernel: &str, device: &str, samples: &[PhaseTiming]) -> KernelStats {
    let n = samples.len() as f64;
    let mean = |f: fn(&PhaseTiming) -> f64| samples.iter().map(f).sum::<f64>() / n;
    let samples_ms: Vec<f64> = samples.iter().map(PhaseTiming::total_ms).collect();
    KernelStats {
        kernel: kernel.into(),
        device: device.into(),
        mean_ms: samples_ms.iter().sum::<f64>() / n,
        copy_in_ms: mean(PhaseTiming::copy_in_ms),
        kernel_ms: mean(PhaseTiming::kernel_ms),
        copy_out_ms: mean(PhaseTiming::copy_out_ms),
        speedup: None,
        samples_ms,
    }
}

/// Warm-up then timed iterations on `net`; returns its two report rows.
fn measure(bench: &mut Bench, net: &mut Net, cfg: &BenchConfig, label: &str) -> Result<[KernelStats; 2]> {
    for _ in 0..cfg.warmup_iters {
        bench.iterate(net)?;
    }
    let mut softmax = Vec::with_capacity(cfg.timed_iters);
    let mut fc = Vec::with_capacity(cfg.timed_iters);
    for _ in 0..cfg.timed_iters {
        let (s, f) = bench.iterate(net)?;
        softmax.push(s);
        fc.push(f);
    }
    Ok([stats(SOFTMAX_BACKWARD, label, &softmax), stats(FC_BACKWARD, label, &fc)])
}

/// Runs the serial baseline and, when configured, the parallel device on
/// identically initialized networks fed the same sample sequence.
///
/// Before timing, one step runs on both networks and every touched buffer is
/// compared bitwise; a mismatch is a [`Error::SelfTest`].
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let data = load_data(cfg)?;
    let eta = LearningRate::new(cfg.eta)?;

    // Timings cover the kernels, not the debug-build write sampler.
    let serial = Device::serial().with_write_checks(false);
    let candidate = match cfg.device {
        DeviceKind::SerialHost => None,
        DeviceKind::ParallelHost => {
            Some(Device::new(DeviceKind::ParallelHost, cfg.workers)?.with_write_checks(false))
        }
    };

    let mut net = build(cfg, &serial)?;
    let mut other = candidate.as_ref().map(|d| build(cfg, d)).transpose()?;

    let mut bench = Bench { data, eta, step: 0 };
    bench.iterate(&mut net)?;
    if let Some(other) = other.as_mut() {
        bench.step = 0;
        bench.iterate(other)?;
        if !bitwise_equal(&snapshot(&net), &snapshot(other)) {
            return Err(Error::SelfTest(
                "parallel device disagrees with the serial baseline after one step".into(),
            ));
        }
    }

    let mut rows = Vec::new();
    let mut fingerprints = Vec::new();
    let start = bench.step;
    rows.extend(measure(&mut bench, &mut net, cfg, "serial")?);
    fingerprints.push(("serial".to_string(), net.fingerprint()));
    drop(net);

    if let Some(mut other) = other {
        bench.step = start;
        rows.extend(measure(&mut bench, &mut other, cfg, "parallel")?);
        fingerprints.push(("parallel".to_string(), other.fingerprint()));
    }
    Ok(BenchReport::new(rows, fingerprints))
}
