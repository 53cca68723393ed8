//! Backward kernels. Lanes span `(o, i)` over `cols_out × cols_input`; lane
//! `(o, i)` writes `gradients[i][o]` and `delta_weights[i][o]`, and lane
//! `(o, 0)` also writes `deltas[o]` and `delta_biases[o]`.

use crate::runtime::{IterSpace, Kernel, Param};
use crate::scalar::Scalar;

/// Argument positions shared by both backward kernels.
pub mod arg {
    pub const DELTAS: usize = 0;
    pub const INPUTS: usize = 1;
    pub const GRADIENTS: usize = 2;
    pub const DELTA_WEIGHTS: usize = 3;
    pub const DELTA_BIASES: usize = 4;
    pub const OUTPUTS: usize = 5;
    /// Softmax: one-hot target. Fully connected: next layer's weights.
    pub const TARGET: usize = 6;
    pub const NEXT_WEIGHTS: usize = 6;
    /// Fully connected only.
    pub const NEXT_DELTAS: usize = 7;
}

#[inline]
fn write_lane<T: Scalar>(lane: &crate::runtime::Lane<'_, T>, delta: T, cols_out: usize, eta: T) {
    let (o, i) = (lane.outer(), lane.inner());
    let grad = delta * lane.get(arg::INPUTS, i);
    let at = i * cols_out + o;
    lane.set(arg::GRADIENTS, at, grad);
    lane.set(arg::DELTA_WEIGHTS, at, -eta * grad);
    if i == 0 {
        lane.set(arg::DELTAS, o, delta);
        lane.set(arg::DELTA_BIASES, o, -eta * delta);
    }
}

/// Softmax + cross-entropy backward.
///
/// Arguments: `deltas, inputs, gradients, delta_weights, delta_biases,
/// outputs, target, cols_out, cols_input, learning_rate`.
/// `deltas[o] = outputs[o] - target[o]`.
pub fn softmax_backward<T: Scalar>(cols_out: usize, cols_input: usize) -> Kernel<T> {
    use Param::*;
    Kernel::new(
        "softmax_backward",
        vec![Buffer, Buffer, Buffer, Buffer, Buffer, Buffer, Buffer, Count, Count, Scalar],
        IterSpace::D2(cols_out, cols_input),
        |lane| {
            let o = lane.outer();
            let cols_out = lane.count(7);
            let eta = lane.scalar(9);
            let delta = lane.get(arg::OUTPUTS, o) - lane.get(arg::TARGET, o);
            write_lane(lane, delta, cols_out, eta);
        },
    )
}

/// Tanh fully connected backward.
///
/// Arguments: `deltas, inputs, gradients, delta_weights, delta_biases,
/// outputs, next_weights, next_deltas, cols_out, cols_input, next_cols,
/// learning_rate`. `next_weights` is `cols_out × next_cols`.
/// `deltas[o] = (1 - outputs[o]^2) * sum_k next_deltas[k] * next_weights[o][k]`.
pub fn fc_backward<T: Scalar>(cols_out: usize, cols_input: usize) -> Kernel<T> {
    use Param::*;
    Kernel::new(
        "fc_backward",
        vec![
            Buffer, Buffer, Buffer, Buffer, Buffer, Buffer, Buffer, Buffer, Count, Count, Count,
            Scalar,
        ],
        IterSpace::D2(cols_out, cols_input),
        |lane| {
            let o = lane.outer();
            let cols_out = lane.count(8);
            let next_cols = lane.count(10);
            let eta = lane.scalar(11);
            let mut back = T::zero();
            for k in 0..next_cols {
                back += lane.get(arg::NEXT_DELTAS, k) * lane.get(arg::NEXT_WEIGHTS, o * next_cols + k);
            }
            let a = lane.get(arg::OUTPUTS, o);
            write_lane(lane, (T::one() - a * a) * back, cols_out, eta);
        },
    )
}
