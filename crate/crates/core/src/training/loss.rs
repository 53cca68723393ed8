use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{DenseVector, Storage};

/// Probabilities are clamped to this before taking the log.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// `-sum_o target[o] * ln(max(predicted[o], 1e-12))`.
pub fn cross_entropy<T: Scalar>(predicted: &DenseVector<T>, target: &DenseVector<T>) -> Result<T> {
    if predicted.len() != target.len() {
        return Err(Error::shape("cross_entropy", target.len(), predicted.len()));
    }
    let floor = T::of(PROBABILITY_FLOOR);
    let mut loss = T::zero();
    for (&p, &t) in predicted.as_slice().iter().zip(target.as_slice()) {
        loss -= t * p.max(floor).ln();
    }
    Ok(loss)
}
