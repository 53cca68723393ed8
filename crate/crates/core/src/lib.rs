//! Feed-forward network training whose backward kernels run as tasks on a
//! portable task-schedule runtime.
//!
//! The engine is generic over its [`Scalar`]; the aliases below fix it to
//! `f32`, which is what the benchmark and the trainer use.

pub mod bench;
pub mod data;
pub mod error;
pub mod nn;
pub mod runtime;
pub mod scalar;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = tensor::DenseMatrix<f32>;
pub type Vector = tensor::DenseVector<f32>;
pub type Network = training::FeedForwardNetwork<f32>;
pub type Samples = data::DataSet<f32>;
