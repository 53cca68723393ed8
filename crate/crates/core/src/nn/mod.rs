//! Fully connected (tanh) and softmax output layers.
//!
//! Forward passes run on the host. Backward passes are task-runtime kernels:
//! each layer owns one [`TaskSchedule`](crate::runtime::TaskSchedule), built on
//! first use and reused for every later sample.

mod fc;
pub mod kernels;
mod softmax;
mod state;

pub use fc::FullyConnectedLayer;
pub use softmax::{softmax_into, SoftmaxOutputLayer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Positive step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRate<T>(T);

impl<T: Scalar> LearningRate<T> {
    pub fn new(eta: T) -> Result<Self> {
        if eta > T::zero() && eta.is_finite() {
            Ok(Self(eta))
        } else {
            Err(Error::Range(format!("learning rate must be positive, got {eta}")))
        }
    }

    pub fn get(self) -> T {
        self.0
    }
}
