//! Runs every acceptance criterion and prints one line per criterion.
//! Exits non-zero if any evaluated criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lanenet::bench::{run_benchmark, BenchConfig, FC_BACKWARD};
use lanenet::data::DataSet;
use lanenet::nn::{softmax_into, FullyConnectedLayer, LearningRate, SoftmaxOutputLayer};
use lanenet::runtime::{
    matmul_kernel, parallel_reduce, Device, DeviceKind, IterSpace, Kernel, Param, ReduceKernel, Shared,
    TaskSchedule,
};
use lanenet::tensor::{DenseMatrix, DenseVector, SeededRng, Storage};
use lanenet::training::{evaluate, train, TrainerConfig};
use lanenet::Network;

enum Outcome {
    Pass(String),
    Fail(String),
    NotEvaluated(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    lo + rng.next_unit() * (hi - lo)
}

fn below(rng: &mut SeededRng, n: usize) -> usize {
    (rng.next_unit() * n as f64) as usize
}

fn random_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> DenseMatrix<f32> {
    let mut m = DenseMatrix::zeros(rows, cols).unwrap();
    m.random_fill(rng, -1.0, 1.0).unwrap();
    m
}

fn random_vector(len: usize, rng: &mut SeededRng) -> DenseVector<f32> {
    let mut v = DenseVector::zeros(len).unwrap();
    v.random_fill(rng, -1.0, 1.0).unwrap();
    v
}

fn parallel_devices() -> Vec<Device> {
    [2, 4, 8]
        .into_iter()
        .map(|w| Device::parallel(w).unwrap().with_min_chunk_lanes(1))
        .collect()
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

// Criterion 1 ---------------------------------------------------------------

/// One tanh hidden layer and a softmax output, evaluated in f64.
struct Reference {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    params: Vec<f64>,
}

impl Reference {
    /// Parameter order: hidden weights, hidden biases, output weights, output biases.
    fn loss(&self, p: &[f64], x: &[f64], target: usize) -> f64 {
        let (w1, rest) = p.split_at(self.n_in * self.n_hidden);
        let (b1, rest) = rest.split_at(self.n_hidden);
        let (w2, b2) = rest.split_at(self.n_hidden * self.n_out);
        let h: Vec<f64> = (0..self.n_hidden)
            .map(|o| (b1[o] + (0..self.n_in).map(|i| x[i] * w1[i * self.n_hidden + o]).sum::<f64>()).tanh())
            .collect();
        let z: Vec<f64> = (0..self.n_out)
            .map(|o| b2[o] + (0..self.n_hidden).map(|i| h[i] * w2[i * self.n_out + o]).sum::<f64>())
            .collect();
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        -(z[target] - max - log_sum)
    }

    fn finite_difference(&self, x: &[f64], target: usize) -> Vec<f64> {
        let mut p = self.params.clone();
        (0..p.len())
            .map(|k| {
                let w = p[k];
                let h = 1e-3 * w.abs().max(1.0);
                p[k] = w + h;
                let up = self.loss(&p, x, target);
                p[k] = w - h;
                let down = self.loss(&p, x, target);
                p[k] = w;
                (up - down) / (2.0 * h)
            })
            .collect()
    }
}

fn flat(v: &[f32]) -> impl Iterator<Item = f64> + '_ {
    v.iter().map(|&x| x as f64)
}

fn criterion_gradients() -> Outcome {
    const TOL: f64 = 1e-3;
    const FLOOR: f64 = 1e-6;
    let start = Instant::now();
    let rng = &mut SeededRng::new(1);
    let (mut worst, mut checked) = (0.0f64, 0usize);
    for _ in 0..50 {
        let (n_in, n_hidden, n_out) = (1 + below(rng, 8), 1 + below(rng, 8), 2 + below(rng, 3));
        let mut net = Network::build(n_in, &[n_hidden], n_out, rng).unwrap();
        let x = random_vector(n_in, rng);
        let target = below(rng, n_out);

        net.forward(&x).unwrap();
        net.backward(&DenseVector::one_hot(n_out, target).unwrap(), LearningRate::new(0.1).unwrap())
            .unwrap();
        let (hidden, output) = (&net.hidden()[0], net.output());
        let analytic: Vec<f64> = flat(hidden.gradients().read().as_slice())
            .chain(flat(hidden.deltas().read().as_slice()))
            .chain(flat(output.gradients().read().as_slice()))
            .chain(flat(output.deltas().read().as_slice()))
            .collect();
        let params: Vec<f64> = flat(hidden.weights().read().as_slice())
            .chain(flat(hidden.biases().read().as_slice()))
            .chain(flat(output.weights().read().as_slice()))
            .chain(flat(output.biases().read().as_slice()))
            .collect();

        let reference = Reference { n_in, n_hidden, n_out, params };
        let xs: Vec<f64> = flat(x.as_slice()).collect();
        let numeric = reference.finite_difference(&xs, target);
        for (a, n) in analytic.iter().zip(&numeric) {
            worst = worst.max((a - n).abs() / a.abs().max(n.abs()).max(FLOOR));
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= TOL && elapsed < Duration::from_secs(60),
        format!("{checked} parameters over 50 networks, worst relative error {worst:.2e}, {}", secs(elapsed)),
    )
}

// Criterion 2 ---------------------------------------------------------------

fn criterion_softmax_identity() -> Outcome {
    let rng = &mut SeededRng::new(2);
    let (mut exact, mut worst_sum, mut worst_shift) = (true, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (n_in, n_out) = (1 + below(rng, 8), 2 + below(rng, 9));
        let mut layer = SoftmaxOutputLayer::<f32>::new(n_in, n_out, rng).unwrap();
        let target = DenseVector::one_hot(n_out, below(rng, n_out)).unwrap();
        let outputs = layer.forward(&random_vector(n_in, rng)).unwrap();
        layer.backward(&target, LearningRate::new(0.1).unwrap()).unwrap();
        let deltas = layer.deltas().read();
        for o in 0..n_out {
            exact &= deltas.get(o).to_bits() == (outputs.get(o) - target.get(o)).to_bits();
        }
        worst_sum = worst_sum.max((outputs.iter().map(|&p| p as f64).sum::<f64>() - 1.0).abs());

        // Logits on a 2^-10 grid and integer shifts keep z + c exact in f32.
        let logits: Vec<f32> = (0..n_out).map(|_| (uniform(rng, -8.0, 8.0) * 1024.0).round() as f32 / 1024.0).collect();
        let shift = (uniform(rng, -1000.0, 1000.0)).round() as f32;
        let shifted: Vec<f32> = logits.iter().map(|z| z + shift).collect();
        let (mut p, mut q) = (vec![0.0f32; n_out], vec![0.0f32; n_out]);
        softmax_into(&logits, &mut p);
        softmax_into(&shifted, &mut q);
        for (a, b) in p.iter().zip(&q) {
            worst_shift = worst_shift.max((a - b).abs() as f64);
        }
    }
    check(
        exact && worst_sum <= 1e-6 && worst_shift <= 1e-6,
        format!(
            "1000 instances, deltas exact: {exact}, worst |sum - 1| {worst_sum:.1e}, worst shift gap {worst_shift:.1e}"
        ),
    )
}

// Criterion 3 ---------------------------------------------------------------

fn bits(v: &[f32]) -> Vec<u32> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn matmul_bits(device: Device, a: &DenseMatrix<f32>, b: &DenseMatrix<f32>) -> Vec<u32> {
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    let (a, b) = (Shared::new(a.clone()), Shared::new(b.clone()));
    let c = Shared::new(DenseMatrix::zeros(n, m).unwrap());
    TaskSchedule::new("mxm")
        .on(device)
        .stream_in([a.handle(), b.handle()])
        .task("t0", matmul_kernel(n, k, m), vec![(&a).into(), (&b).into(), (&c).into()])
        .unwrap()
        .stream_out([c.handle()])
        .execute()
        .unwrap();
    let out = bits(c.read().as_slice());
    out
}

macro_rules! stream_out_bits {
    ($layer:expr) => {
        vec![
            bits($layer.deltas().read().as_slice()),
            bits($layer.gradients().read().as_slice()),
            bits($layer.delta_weights().read().as_slice()),
            bits($layer.delta_biases().read().as_slice()),
        ]
    };
}

fn softmax_bits(device: Device, seed: u64, n_in: usize, n_out: usize) -> Vec<Vec<u32>> {
    let rng = &mut SeededRng::new(seed);
    let mut layer =
        SoftmaxOutputLayer::with_weights(random_matrix(n_in, n_out, rng), random_vector(n_out, rng)).unwrap();
    layer.bind(device);
    layer.forward(&random_vector(n_in, rng)).unwrap();
    let target = DenseVector::one_hot(n_out, below(rng, n_out)).unwrap();
    layer.backward(&target, LearningRate::new(0.05).unwrap()).unwrap();
    let out = stream_out_bits!(layer);
    out
}

fn fc_bits(device: Device, seed: u64, n_in: usize, n_out: usize, next: usize) -> Vec<Vec<u32>> {
    let rng = &mut SeededRng::new(seed);
    let mut layer =
        FullyConnectedLayer::with_weights(random_matrix(n_in, n_out, rng), random_vector(n_out, rng)).unwrap();
    let next_weights = Shared::new(random_matrix(n_out, next, rng));
    let next_deltas = Shared::new(random_vector(next, rng));
    layer.bind(device);
    layer.forward(&random_vector(n_in, rng)).unwrap();
    layer
        .backward(&next_weights, &next_deltas, LearningRate::new(0.05).unwrap())
        .unwrap();
    let out = stream_out_bits!(layer);
    out
}

fn criterion_backend_equivalence() -> Outcome {
    let rng = &mut SeededRng::new(3);
    let devices = parallel_devices();
    let mut mismatches = Vec::new();
    for instance in 0..100u64 {
        let (n, k, m) = (1 + below(rng, 40), 1 + below(rng, 40), 1 + below(rng, 40));
        let (a, b) = (random_matrix(n, k, rng), random_matrix(k, m, rng));
        let seed = rng.next_unit().to_bits();
        let (n_in, n_out, next) = (1 + below(rng, 40), 2 + below(rng, 40), 1 + below(rng, 10));

        let serial = (
            matmul_bits(Device::serial(), &a, &b),
            softmax_bits(Device::serial(), seed, n_in, n_out),
            fc_bits(Device::serial(), seed, n_in, n_out, next),
        );
        for d in &devices {
            if matmul_bits(d.clone(), &a, &b) != serial.0 {
                mismatches.push(format!("mxm #{instance} on {} workers", d.workers()));
            }
            if softmax_bits(d.clone(), seed, n_in, n_out) != serial.1 {
                mismatches.push(format!("softmax_backward #{instance} on {} workers", d.workers()));
            }
            if fc_bits(d.clone(), seed, n_in, n_out, next) != serial.2 {
                mismatches.push(format!("fc_backward #{instance} on {} workers", d.workers()));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("100 instances x 3 kernels x {{2,4,8}} workers, mismatches: {mismatches:?}"),
    )
}

// Criterion 4 ---------------------------------------------------------------

fn add_one(n: usize) -> Kernel<f32> {
    Kernel::new("add_one", vec![Param::Buffer, Param::Buffer], IterSpace::D1(n), |lane| {
        let i = lane.outer();
        lane.set(1, i, lane.get(0, i) + 1.0);
    })
}

fn criterion_copy_semantics() -> Outcome {
    let host = |v: &[f32]| Shared::new(DenseVector::from_vec(v.to_vec()));
    let read = |s: &Shared<DenseVector<f32>>| s.read().as_slice().to_vec();
    let oracle = |v: &[f32]| v.iter().map(|x| x + 1.0).collect::<Vec<f32>>();
    let mut failures = Vec::new();

    // Propagate: a stream_in buffer is re-read from the host on every execute.
    let (src, dst) = (host(&[1.0, 2.0, 3.0]), host(&[0.0; 3]));
    let mut s = TaskSchedule::new("propagate")
        .stream_in([src.handle()])
        .task("t", add_one(3), vec![(&src).into(), (&dst).into()])
        .unwrap()
        .stream_out([dst.handle()]);
    s.execute().unwrap();
    src.write().as_mut_slice().copy_from_slice(&[5.0, 6.0, 7.0]);
    s.execute().unwrap();
    if read(&dst) != oracle(&[5.0, 6.0, 7.0]) {
        failures.push("propagate");
    }

    // Cache: a buffer outside stream_in keeps its first device copy.
    let (src, dst) = (host(&[1.0, 2.0]), host(&[0.0; 2]));
    let mut s = TaskSchedule::new("cache")
        .task("t", add_one(2), vec![(&src).into(), (&dst).into()])
        .unwrap()
        .stream_out([dst.handle()]);
    s.execute().unwrap();
    src.write().as_mut_slice().copy_from_slice(&[10.0, 20.0]);
    s.execute().unwrap();
    if read(&dst) != oracle(&[1.0, 2.0]) {
        failures.push("cache");
    }

    // Isolate: device writes to a buffer outside stream_out never reach the host.
    let (src, mid, dst) = (host(&[1.0, 2.0]), host(&[-9.0, -9.0]), host(&[0.0; 2]));
    let mut s = TaskSchedule::new("isolate")
        .stream_in([src.handle()])
        .task("a", add_one(2), vec![(&src).into(), (&mid).into()])
        .unwrap()
        .task("b", add_one(2), vec![(&mid).into(), (&dst).into()])
        .unwrap()
        .stream_out([dst.handle()]);
    s.execute().unwrap();
    if read(&mid) != [-9.0, -9.0] || read(&dst) != oracle(&oracle(&[1.0, 2.0])) {
        failures.push("isolate");
    }

    // Migrate: identical results on every device, residency rebuilt after a move.
    let rng = &mut SeededRng::new(4);
    let (a, b) = (random_matrix(9, 7, rng), random_matrix(7, 5, rng));
    let expected = bits(a.matmul(&b).unwrap().as_slice());
    let (a, b) = (Shared::new(a), Shared::new(b));
    let c = Shared::new(DenseMatrix::zeros(9, 5).unwrap());
    let mut s = TaskSchedule::new("migrate")
        .task("t0", matmul_kernel(9, 7, 5), vec![(&a).into(), (&b).into(), (&c).into()])
        .unwrap()
        .stream_out([c.handle()]);
    let mut targets = vec![Device::serial()];
    targets.extend(parallel_devices());
    targets.push(Device::serial());
    for device in targets {
        s.migrate(device);
        if s.is_resident(a.id()) {
            failures.push("migrate residency");
        }
        c.write().as_mut_slice().fill(0.0);
        s.execute().unwrap();
        if bits(c.read().as_slice()) != expected {
            failures.push("migrate result");
        }
    }

    check(
        failures.is_empty(),
        format!("propagate, cache, isolate, migrate against host oracles, failures: {failures:?}"),
    )
}

// Criterion 5 ---------------------------------------------------------------

fn criterion_iris() -> Outcome {
    let start = Instant::now();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/iris_data_normalised.txt");
    let data = DataSet::<f32>::load(path, 4, 3).unwrap();
    let (train_set, test_set) = data.split(0.9, 42).unwrap();
    let mut net = Network::build(4, &[8], 3, &mut SeededRng::new(42)).unwrap();
    let cfg = TrainerConfig::new(0.1, 0.05, 2000, 42).unwrap();
    let history = train(&mut net, &train_set, &cfg, &Device::serial()).unwrap();
    let accuracy = evaluate(&mut net, &test_set).unwrap().accuracy;
    let elapsed = start.elapsed();
    check(
        accuracy >= 0.9 && history.len() <= 2000 && elapsed < Duration::from_secs(30),
        format!(
            "{}/{} split, test accuracy {accuracy:.3} after {} epochs, {}",
            train_set.len(),
            test_set.len(),
            history.len(),
            secs(elapsed)
        ),
    )
}

// Criterion 6 ---------------------------------------------------------------

fn crossover_config(features: usize, classes: usize, fc_neurons: usize) -> BenchConfig {
    BenchConfig {
        features,
        classes,
        fc_neurons,
        warmup_iters: 100,
        timed_iters: 10,
        device: DeviceKind::ParallelHost,
        ..Default::default()
    }
}

fn criterion_crossover() -> Outcome {
    let start = Instant::now();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());

    let tiny = run_benchmark(&crossover_config(4, 3, 8)).unwrap();
    let parallel: Vec<_> = tiny.rows.iter().filter(|r| r.device == "parallel").collect();
    let copy: f64 = parallel.iter().map(|r| r.copy_ms()).sum();
    let total: f64 = parallel.iter().map(|r| r.mean_ms).sum();
    let share = copy / total;
    let per_kernel: Vec<String> = parallel
        .iter()
        .map(|r| format!("{} {:.2}", r.kernel, r.copy_ms() / r.mean_ms))
        .collect();
    let part_b = share > 0.5;
    let b = format!("(b) copy share of parallel time {share:.3} [{}]", per_kernel.join(", "));

    if cores < 4 {
        let detail = format!("(a) not evaluated: host has {cores} logical core(s), needs 4; {b}");
        return if part_b { Outcome::NotEvaluated(detail) } else { Outcome::Fail(detail) };
    }

    let speedup = |n| {
        let r = run_benchmark(&crossover_config(340, 10, n)).unwrap();
        r.row(FC_BACKWARD, "parallel").and_then(|row| row.speedup).unwrap()
    };
    let (small, large) = (speedup(100), speedup(100_000));
    let elapsed = start.elapsed();
    check(
        large > small && part_b && elapsed < Duration::from_secs(300),
        format!("(a) fc_backward speedup {large:.3} at 100000 vs {small:.3} at 100; {b}; {}", secs(elapsed)),
    )
}

// Criterion 7 ---------------------------------------------------------------

fn criterion_determinism() -> Outcome {
    let cfg = BenchConfig {
        features: 16,
        classes: 4,
        fc_neurons: 256,
        warmup_iters: 100,
        timed_iters: 10,
        device: DeviceKind::ParallelHost,
        workers: Some(4),
        seed: 7,
        ..Default::default()
    };
    let (first, second) = (run_benchmark(&cfg).unwrap(), run_benchmark(&cfg).unwrap());
    let bench_ok = first.fingerprints == second.fingerprints && first.fingerprints.len() == 2;

    let data = DataSet::<f32>::synthetic(6, 3, 60, &mut SeededRng::new(7)).unwrap();
    let trained = |device: &Device| {
        let mut net = Network::build(6, &[10], 3, &mut SeededRng::new(7)).unwrap();
        let cfg = TrainerConfig::new(0.05, 0.0, 5, 7).unwrap();
        train(&mut net, &data, &cfg, device).unwrap();
        net.fingerprint()
    };
    let mut train_ok = true;
    for device in [Device::serial(), Device::parallel(4).unwrap().with_min_chunk_lanes(1)] {
        train_ok &= trained(&device) == trained(&device);
    }
    check(
        bench_ok && train_ok,
        format!(
            "benchmark fingerprints {:?} vs {:?}; repeated training identical on both devices: {train_ok}",
            first.fingerprints, second.fingerprints
        ),
    )
}

// Criterion 8 ---------------------------------------------------------------

fn criterion_reduction() -> Outcome {
    let mut devices = vec![Device::serial()];
    devices.extend(parallel_devices());
    devices.push(Device::parallel(4).unwrap());

    let integers = ReduceKernel::new(|i| (i + 1) as f32, |a, b| a + b, 0.0f32);
    let exact = devices.iter().all(|d| parallel_reduce(&integers, 100, d) == 5050.0);

    let mut worst = 0.0f64;
    for seed in 0..20 {
        let rng = &mut SeededRng::new(seed);
        let values: Vec<f32> = (0..10_000).map(|_| rng.next_unit() as f32).collect();
        let sum = ReduceKernel::new(move |i| values[i] as f64, |a, b| a + b, 0.0f64);
        let serial = parallel_reduce(&sum, 10_000, &Device::serial());
        for d in &devices {
            worst = worst.max((parallel_reduce(&sum, 10_000, d) - serial).abs());
        }
    }
    check(
        exact && worst <= 1e-3,
        format!("1..100 sums to 5050 on every device: {exact}; worst gap over 20 x 10^4 floats {worst:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("gradient correctness", criterion_gradients),
        ("softmax/cross-entropy identity", criterion_softmax_identity),
        ("backend equivalence", criterion_backend_equivalence),
        ("copy semantics", criterion_copy_semantics),
        ("training quality (Iris)", criterion_iris),
        ("crossover direction", criterion_crossover),
        ("determinism", criterion_determinism),
        ("reduction correctness", criterion_reduction),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::NotEvaluated(d) => ("NOT EVALUATED", d),
        };
        println!("criterion {} {name}: {status} - {detail}", n + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
