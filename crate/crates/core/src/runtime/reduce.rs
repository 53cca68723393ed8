use std::sync::Arc;

use super::device::Device;

type ElementFn<T> = dyn Fn(usize) -> T + Send + Sync;
type CombineFn<T> = dyn Fn(T, T) -> T + Send + Sync;

/// Reduction of `element(0..extent)` under an associative, commutative
/// `combine` with neutral `identity`.
pub struct ReduceKernel<T> {
    element: Arc<ElementFn<T>>,
    combine: Arc<CombineFn<T>>,
    identity: T,
}

impl<T: Copy> ReduceKernel<T> {
    pub fn new<E, C>(element: E, combine: C, identity: T) -> Self
    where
        E: Fn(usize) -> T + Send + Sync + 'static,
        C: Fn(T, T) -> T + Send + Sync + 'static,
    {
        Self {
            element: Arc::new(element),
            combine: Arc::new(combine),
            identity,
        }
    }

    pub fn identity(&self) -> T {
        self.identity
    }

    pub fn combine(&self, a: T, b: T) -> T {
        (self.combine)(a, b)
    }

    pub fn element(&self, i: usize) -> T {
        (self.element)(i)
    }
}

/// Folds the kernel over `0..extent`.
///
/// Serial-host folds in ascending index order. Parallel-host folds each
/// contiguous chunk from the identity, then combines the partials once, in
/// chunk order.
pub fn parallel_reduce<T: Copy + Send + Sync>(
    kernel: &ReduceKernel<T>,
    extent: usize,
    device: &Device,
) -> T {
    let chunks = device.chunks(extent, extent);
    let partials = device.map_chunks(chunks, |range| {
        range.fold(kernel.identity, |acc, i| kernel.combine(acc, kernel.element(i)))
    });
    partials
        .into_iter()
        .fold(kernel.identity, |acc, p| kernel.combine(acc, p))
}
