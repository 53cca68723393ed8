//! Task-schedule runtime.
//!
//! A [`TaskSchedule`] groups kernels that run together on one [`Device`]. Every
//! device owns memory that is separate from the host: buffers reach it only
//! through the copy-in phase of [`TaskSchedule::execute`] and come back only
//! through copy-out. Buffers marked with `stream_in` are copied on every
//! execute; other arguments are copied once per device and then stay resident.
//! Buffers marked with `stream_out` are copied back after the last task.
//!
//! Kernels follow the disjoint-writes contract: two distinct lanes of an
//! iteration space never write the same element. The runtime does not detect
//! violations in release builds. Debug builds sample the write sets of a
//! subset of lanes and panic on a collision.

mod buffer;
mod builtin;
mod device;
mod kernel;
mod reduce;
mod schedule;
mod timing;

pub use buffer::{BufferId, BufferRef, HostBuffer, Shared};
pub use builtin::{fill_kernel, matmul_kernel};
pub use device::{Device, DeviceKind, DEFAULT_MIN_CHUNK_LANES};
pub use kernel::{Arg, IterSpace, Kernel, Lane, Param};
pub use reduce::{parallel_reduce, ReduceKernel};
pub use schedule::TaskSchedule;
pub use timing::{ExecutionTiming, PhaseTiming, TaskTiming};
