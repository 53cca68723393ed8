use crate::scalar::Scalar;

use super::kernel::{IterSpace, Kernel, Param};

/// `C = A × B` for row-major `A: n×k`, `B: k×m`, `C: n×m`. Arguments `(A, B, C)`.
///
/// Lanes span `(i, j)`; each lane sums over `k` sequentially in ascending
/// order, so every backend produces the same bits.
pub fn matmul_kernel<T: Scalar>(n: usize, k: usize, m: usize) -> Kernel<T> {
    Kernel::new(
        "mxm",
        vec![Param::Buffer, Param::Buffer, Param::Buffer],
        IterSpace::D2(n, m),
        move |lane| {
            let (i, j) = (lane.outer(), lane.inner());
            let mut sum = T::zero();
            for kk in 0..k {
                sum += lane.get(0, i * k + kk) * lane.get(1, kk * m + j);
            }
            lane.set(2, i * m + j, sum);
        },
    )
}

/// Writes the scalar argument into every element. Arguments `(dst, value)`.
pub fn fill_kernel<T: Scalar>(len: usize) -> Kernel<T> {
    Kernel::new(
        "fill",
        vec![Param::Buffer, Param::Scalar],
        IterSpace::D1(len),
        |lane| lane.set(0, lane.outer(), lane.scalar(1)),
    )
}
