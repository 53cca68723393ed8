use rand::seq::SliceRandom;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::nn::LearningRate;
use crate::runtime::Device;
use crate::scalar::Scalar;
use crate::tensor::{DenseVector, SeededRng};

use super::loss::cross_entropy;
use super::network::FeedForwardNetwork;

#[derive(Debug, Clone, Copy)]
pub struct TrainerConfig<T> {
    pub eta: LearningRate<T>,
    /// Training stops after the first epoch whose mean loss is at or below this.
    pub max_error: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl<T: Scalar> TrainerConfig<T> {
    pub fn new(eta: T, max_error: f64, max_epochs: usize, seed: u64) -> Result<Self> {
        if max_epochs == 0 {
            return Err(Error::Range("max_epochs must be at least 1".into()));
        }
        if max_error.is_nan() || max_error < 0.0 {
            return Err(Error::Range(format!("max_error must be non-negative, got {max_error}")));
        }
        Ok(Self {
            eta: LearningRate::new(eta)?,
            max_error,
            max_epochs,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub accuracy: f64,
}

fn check_shapes<T: Scalar>(net: &FeedForwardNetwork<T>, data: &DataSet<T>) -> Result<()> {
    if data.feature_width() != net.input_width() {
        return Err(Error::shape("dataset features", net.input_width(), data.feature_width()));
    }
    if data.class_count() != net.classes() {
        return Err(Error::shape("dataset classes", net.classes(), data.class_count()));
    }
    Ok(())
}

fn hit<T: Scalar>(predicted: &DenseVector<T>, target: &DenseVector<T>) -> bool {
    predicted.argmax() == target.argmax()
}

/// Online gradient descent with a seeded shuffle per epoch. Backward kernels
/// run on `device`.
pub fn train<T: Scalar>(
    net: &mut FeedForwardNetwork<T>,
    train_set: &DataSet<T>,
    cfg: &TrainerConfig<T>,
    device: &Device,
) -> Result<Vec<EpochStats>> {
    if train_set.is_empty() {
        return Err(Error::Training("training set is empty".into()));
    }
    check_shapes(net, train_set)?;
    net.bind(device);

    let mut rng = SeededRng::new(cfg.seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = Vec::new();
    for epoch in 0..cfg.max_epochs {
        order.sort_unstable();
        order.shuffle(&mut rng);
        let (mut loss_sum, mut hits) = (0.0f64, 0usize);
        for &i in &order {
            let sample = &train_set.items()[i];
            let (loss, predicted) = net.train_step(&sample.features, &sample.label, cfg.eta)?;
            loss_sum += loss.as_f64();
            hits += usize::from(hit(&predicted, &sample.label));
        }
        let n = train_set.len() as f64;
        let stats = EpochStats {
            epoch,
            mean_loss: loss_sum / n,
            accuracy: hits as f64 / n,
        };
        history.push(stats);
        if stats.mean_loss <= cfg.max_error {
            break;
        }
    }
    Ok(history)
}

/// Mean loss and argmax accuracy over `test_set`, with no parameter updates.
pub fn evaluate<T: Scalar>(net: &mut FeedForwardNetwork<T>, test_set: &DataSet<T>) -> Result<EpochStats> {
    if test_set.is_empty() {
        return Err(Error::Evaluation("test set is empty".into()));
    }
    check_shapes(net, test_set)?;
    let (mut loss_sum, mut predictions) = (0.0f64, Vec::with_capacity(test_set.len()));
    for sample in test_set.items() {
        let predicted = net.forward(&sample.features)?;
        loss_sum += cross_entropy(&predicted, &sample.label)?.as_f64();
        predictions.push(predicted);
    }
    let targets: Vec<&DenseVector<T>> = test_set.items().iter().map(|s| &s.label).collect();
    Ok(EpochStats {
        epoch: 0,
        mean_loss: loss_sum / test_set.len() as f64,
        accuracy: accuracy(predictions.iter(), targets.into_iter()),
    })
}

/// Fraction of rows whose argmax agrees, ties going to the lowest index.
pub fn accuracy<'a, T: Scalar>(
    predicted: impl Iterator<Item = &'a DenseVector<T>>,
    targets: impl Iterator<Item = &'a DenseVector<T>>,
) -> f64 {
    let (mut n, mut hits) = (0usize, 0usize);
    for (p, t) in predicted.zip(targets) {
        n += 1;
        hits += usize::from(hit(p, t));
    }
    if n == 0 {
        0.0
    } else {
        hits as f64 / n as f64
    }
}
