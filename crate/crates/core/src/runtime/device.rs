use std::cell::RefCell;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

use super::kernel::{DeviceArg, Kernel, Lane};

/// Parallel-host runs a kernel inline, with the same chunking, unless every
/// worker would receive at least this many lanes.
pub const DEFAULT_MIN_CHUNK_LANES: usize = 2048;

/// Number of evenly spaced lanes whose write sets are checked in debug builds.
/// Each base lane also samples its inner and outer neighbour.
const SAMPLED_BASE_LANES: usize = 32;

static NEXT_DEVICE: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceKind {
    SerialHost,
    ParallelHost,
}

impl DeviceKind {
    pub fn label(&self) -> &'static str {
        match self {
            DeviceKind::SerialHost => "serial",
            DeviceKind::ParallelHost => "parallel",
        }
    }
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DeviceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "serial" => Ok(DeviceKind::SerialHost),
            "parallel" => Ok(DeviceKind::ParallelHost),
            other => Err(Error::Config(format!(
                "unknown device `{other}`, expected serial or parallel"
            ))),
        }
    }
}

/// An execution backend.
///
/// Clones refer to the same device. Schedules keep their device-side arena
/// keyed by the device identity, so migrating between clones is a no-op.
#[derive(Clone)]
pub struct Device {
    id: u64,
    kind: DeviceKind,
    workers: usize,
    min_chunk_lanes: usize,
    write_checks: bool,
    pool: Option<Arc<ThreadPool>>,
}

impl fmt::Debug for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Device")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("workers", &self.workers)
            .field("min_chunk_lanes", &self.min_chunk_lanes)
            .field("write_checks", &self.write_checks)
            .finish()
    }
}

impl Device {
    pub fn serial() -> Self {
        Self {
            id: NEXT_DEVICE.fetch_add(1, Ordering::Relaxed),
            kind: DeviceKind::SerialHost,
            workers: 1,
            min_chunk_lanes: DEFAULT_MIN_CHUNK_LANES,
            write_checks: cfg!(debug_assertions),
            pool: None,
        }
    }

    pub fn parallel(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("parallel device needs at least one worker".into()));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("lane-worker-{i}"))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Self {
            id: NEXT_DEVICE.fetch_add(1, Ordering::Relaxed),
            kind: DeviceKind::ParallelHost,
            workers,
            min_chunk_lanes: DEFAULT_MIN_CHUNK_LANES,
            write_checks: cfg!(debug_assertions),
            pool: Some(Arc::new(pool)),
        })
    }

    pub fn new(kind: DeviceKind, workers: Option<usize>) -> Result<Self> {
        match kind {
            DeviceKind::SerialHost => Ok(Self::serial()),
            DeviceKind::ParallelHost => Self::parallel(workers.unwrap_or_else(logical_cores)),
        }
    }

    /// Sets the fan-out threshold. `1` always fans out when there is more than one chunk.
    pub fn with_min_chunk_lanes(mut self, lanes: usize) -> Self {
        self.min_chunk_lanes = lanes.max(1);
        self
    }

    /// Turns the sampled disjoint-writes check on or off. It is on by default
    /// in debug builds and has no effect in release builds.
    pub fn with_write_checks(mut self, on: bool) -> Self {
        self.write_checks = on && cfg!(debug_assertions);
        self
    }

    /// Reads `LANE_DEVICE` (`serial` | `parallel`, default serial) and
    /// `LANE_WORKERS` (positive integer, default the logical core count).
    pub fn from_env() -> Result<Self> {
        let kind = std::env::var("LANE_DEVICE").ok();
        let workers = std::env::var("LANE_WORKERS").ok();
        Self::from_settings(kind.as_deref(), workers.as_deref())
    }

    pub fn from_settings(kind: Option<&str>, workers: Option<&str>) -> Result<Self> {
        let kind = kind.map(str::parse).transpose()?.unwrap_or(DeviceKind::SerialHost);
        let workers = workers.map(parse_workers).transpose()?;
        Self::new(kind, workers)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn kind(&self) -> DeviceKind {
        self.kind
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Contiguous, near-equal partition of `0..outer`. `lanes` is the total
    /// work and decides how many chunks are worth a worker.
    pub(crate) fn chunks(&self, outer: usize, lanes: usize) -> Vec<Range<usize>> {
        let n = match self.kind {
            DeviceKind::SerialHost => 1,
            DeviceKind::ParallelHost => self
                .workers
                .min(outer)
                .min(lanes / self.min_chunk_lanes)
                .max(1),
        };
        (0..n).map(|k| k * outer / n..(k + 1) * outer / n).collect()
    }

    /// Runs `f` on every chunk and returns the results in chunk order.
    pub(crate) fn map_chunks<R, F>(&self, chunks: Vec<Range<usize>>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(Range<usize>) -> R + Sync,
    {
        match &self.pool {
            Some(pool) if chunks.len() > 1 => {
                let mut slots: Vec<Option<R>> = chunks.iter().map(|_| None).collect();
                let f = &f;
                pool.scope(|s| {
                    for (slot, range) in slots.iter_mut().zip(chunks) {
                        s.spawn(move |_| *slot = Some(f(range)));
                    }
                });
                slots.into_iter().map(|r| r.expect("chunk completed")).collect()
            }
            _ => chunks.into_iter().map(f).collect(),
        }
    }

    pub(crate) fn dispatch<T: Copy + Send + Sync>(&self, kernel: &Kernel<T>, args: &[DeviceArg<T>]) {
        let space = kernel.space();
        let (outer, inner) = (space.outer(), space.inner());
        if space.lanes() == 0 {
            return;
        }
        let sampler = self.write_checks.then(|| WriteSampler::new(outer, inner));
        let chunks = self.chunks(outer, space.lanes());
        let body = kernel.body();

        match &self.pool {
            Some(pool) if chunks.len() > 1 => pool.scope(|s| {
                for range in chunks {
                    let sampler = sampler.as_ref();
                    s.spawn(move |_| run_range(body, args, range, inner, sampler));
                }
            }),
            _ => {
                for range in chunks {
                    run_range(body, args, range, inner, sampler.as_ref());
                }
            }
        }

        if let Some(sampler) = sampler {
            sampler.check(kernel.name());
        }
    }
}

fn run_range<T: Copy>(
    body: &(dyn Fn(&Lane<'_, T>) + Send + Sync),
    args: &[DeviceArg<T>],
    range: Range<usize>,
    inner: usize,
    sampler: Option<&WriteSampler>,
) {
    let Some(sampler) = sampler else {
        for outer in range {
            for i in 0..inner {
                body(&Lane {
                    outer,
                    inner: i,
                    args,
                    log: None,
                });
            }
        }
        return;
    };

    let mut cursor = sampler.first_at_or_after(range.start * inner);
    for outer in range {
        for i in 0..inner {
            let linear = outer * inner + i;
            if sampler.lanes.get(cursor) == Some(&linear) {
                cursor += 1;
                let log = RefCell::new(Vec::new());
                body(&Lane {
                    outer,
                    inner: i,
                    args,
                    log: Some(&log),
                });
                sampler.record(linear, log.into_inner());
            } else {
                body(&Lane {
                    outer,
                    inner: i,
                    args,
                    log: None,
                });
            }
        }
    }
}

/// Debug-build check of the disjoint-writes contract on a sample of lanes.
struct WriteSampler {
    lanes: Vec<usize>,
    writes: Mutex<Vec<(usize, usize, usize)>>,
}

impl WriteSampler {
    fn new(outer: usize, inner: usize) -> Self {
        let total = outer * inner;
        let stride = (total / SAMPLED_BASE_LANES).max(1);
        let mut lanes = Vec::new();
        for base in (0..total).step_by(stride) {
            lanes.push(base);
            if (base % inner) + 1 < inner {
                lanes.push(base + 1);
            }
            if base + inner < total {
                lanes.push(base + inner);
            }
        }
        lanes.sort_unstable();
        lanes.dedup();
        Self {
            lanes,
            writes: Mutex::new(Vec::new()),
        }
    }

    fn first_at_or_after(&self, linear: usize) -> usize {
        self.lanes.partition_point(|&l| l < linear)
    }

    fn record(&self, lane: usize, writes: Vec<(usize, usize)>) {
        let mut all = self.writes.lock();
        all.extend(writes.into_iter().map(|(arg, pos)| (arg, pos, lane)));
    }

    fn check(self, kernel: &str) {
        let mut writes = self.writes.into_inner();
        writes.sort_unstable();
        for pair in writes.windows(2) {
            let ((a0, p0, l0), (a1, p1, l1)) = (pair[0], pair[1]);
            if a0 == a1 && p0 == p1 && l0 != l1 {
                panic!(
                    "kernel `{kernel}` violates disjoint writes: lanes {l0} and {l1} both write argument {a0}[{p0}]"
                );
            }
        }
    }
}

pub(crate) fn logical_cores() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_workers(s: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::Config(format!(
            "worker count must be a positive integer, got `{s}`"
        ))),
    }
}
