use lanenet::data::DataSet;
use lanenet::nn::{FullyConnectedLayer, LearningRate, SoftmaxOutputLayer};
use lanenet::runtime::{matmul_kernel, Device, Shared, TaskSchedule};
use lanenet::tensor::{DenseMatrix, DenseVector, SeededRng, Storage};
use lanenet::training::{train, FeedForwardNetwork, TrainerConfig};
use proptest::prelude::*;

fn devices() -> Vec<Device> {
    [2, 4, 8]
        .into_iter()
        .map(|w| Device::parallel(w).unwrap().with_min_chunk_lanes(1))
        .collect()
}

fn bits(v: &[f32]) -> Vec<u32> {
    v.iter().map(|x| x.to_bits()).collect()
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

fn matmul_on(device: Device, a: &DenseMatrix<f32>, b: &DenseMatrix<f32>) -> Vec<u32> {
    let c = Shared::new(DenseMatrix::zeros(a.rows(), b.cols()).unwrap());
    let (a, b) = (Shared::new(a.clone()), Shared::new(b.clone()));
    let (n, k, m) = (a.read().rows(), a.read().cols(), b.read().cols());
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

fn softmax_on(device: Device, seed: u64, cols_in: usize, cols_out: usize) -> Vec<Vec<u32>> {
    let rng = &mut SeededRng::new(seed);
    let mut layer =
        SoftmaxOutputLayer::with_weights(random_matrix(cols_in, cols_out, rng), random_vector(cols_out, rng)).unwrap();
    layer.bind(device);
    layer.forward(&random_vector(cols_in, rng)).unwrap();
    let target = DenseVector::one_hot(cols_out, seed as usize % cols_out).unwrap();
    layer.backward(&target, LearningRate::new(0.1).unwrap()).unwrap();
    let out = stream_out_bits!(layer);
    out
}

fn fc_on(device: Device, seed: u64, cols_in: usize, cols_out: usize, next: usize) -> Vec<Vec<u32>> {
    let rng = &mut SeededRng::new(seed);
    let mut layer =
        FullyConnectedLayer::with_weights(random_matrix(cols_in, cols_out, rng), random_vector(cols_out, rng)).unwrap();
    let next_weights = Shared::new(random_matrix(cols_out, next, rng));
    let next_deltas = Shared::new(random_vector(next, rng));
    layer.bind(device);
    layer.forward(&random_vector(cols_in, rng)).unwrap();
    layer
        .backward(&next_weights, &next_deltas, LearningRate::new(0.1).unwrap())
        .unwrap();
    let out = stream_out_bits!(layer);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matmul_agrees_across_devices(n in 1usize..12, k in 1usize..12, m in 1usize..12, seed in any::<u64>()) {
        let rng = &mut SeededRng::new(seed);
        let (a, b) = (random_matrix(n, k, rng), random_matrix(k, m, rng));
        let serial = matmul_on(Device::serial(), &a, &b);
        prop_assert_eq!(&serial, &bits(a.matmul(&b).unwrap().as_slice()));
        for d in devices() {
            prop_assert_eq!(&matmul_on(d, &a, &b), &serial);
        }
    }

    #[test]
    fn softmax_backward_agrees_across_devices(cols_in in 1usize..10, cols_out in 2usize..10, seed in any::<u64>()) {
        let serial = softmax_on(Device::serial(), seed, cols_in, cols_out);
        for d in devices() {
            prop_assert_eq!(&softmax_on(d, seed, cols_in, cols_out), &serial);
        }
    }

    #[test]
    fn fc_backward_agrees_across_devices(cols_in in 1usize..10, cols_out in 1usize..10, next in 1usize..6, seed in any::<u64>()) {
        let serial = fc_on(Device::serial(), seed, cols_in, cols_out, next);
        for d in devices() {
            prop_assert_eq!(&fc_on(d, seed, cols_in, cols_out, next), &serial);
        }
    }
}

#[test]
fn default_threshold_gives_the_same_bits() {
    let rng = &mut SeededRng::new(9);
    let (a, b) = (random_matrix(64, 40, rng), random_matrix(40, 80, rng));
    let serial = matmul_on(Device::serial(), &a, &b);
    assert_eq!(matmul_on(Device::parallel(4).unwrap(), &a, &b), serial);
}

#[test]
fn training_losses_match_bitwise_across_devices() {
    let data = DataSet::<f32>::synthetic(5, 3, 40, &mut SeededRng::new(11)).unwrap();
    let cfg = TrainerConfig::new(0.05f32, 0.0, 6, 11).unwrap();
    let run = |device: Device| {
        let mut net = FeedForwardNetwork::build(5, &[7, 4], 3, &mut SeededRng::new(11)).unwrap();
        let losses: Vec<u64> = train(&mut net, &data, &cfg, &device)
            .unwrap()
            .iter()
            .map(|s| s.mean_loss.to_bits())
            .collect();
        (losses, net.fingerprint())
    };
    let serial = run(Device::serial());
    assert_eq!(serial.0.len(), 6);
    for d in devices() {
        assert_eq!(run(d), serial);
    }
}
