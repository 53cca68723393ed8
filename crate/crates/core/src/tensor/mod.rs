//! Flat row-major containers. These are the only storage forms kernels accept.

mod matrix;
mod rng;
mod vector;

pub use matrix::DenseMatrix;
pub use rng::SeededRng;
pub use vector::DenseVector;

/// Contiguous element storage that a device arena can mirror.
pub trait Storage<T> {
    fn as_slice(&self) -> &[T];
    fn as_mut_slice(&mut self) -> &mut [T];
}
