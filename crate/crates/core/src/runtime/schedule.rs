use std::collections::{HashMap, HashSet};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::buffer::{BufferId, BufferRef};
use super::device::Device;
use super::kernel::{Arg, DeviceArg, Kernel, RawBuffer};
use super::timing::{ExecutionTiming, PhaseTiming, TaskTiming};

struct Task<T> {
    name: String,
    kernel: Kernel<T>,
    args: Vec<Arg<T>>,
}

/// A named group of kernels executed together on one device.
///
/// ```
/// use lanenet::runtime::{matmul_kernel, Arg, Shared, TaskSchedule};
/// use lanenet::Matrix;
///
/// let a = Shared::new(Matrix::new(2, 2, 1.0).unwrap());
/// let b = Shared::new(Matrix::identity(2).unwrap());
/// let c = Shared::new(Matrix::zeros(2, 2).unwrap());
/// let mut s0 = TaskSchedule::new("s0")
///     .task("t0", matmul_kernel(2, 2, 2), vec![(&a).into(), (&b).into(), (&c).into()])
///     .unwrap()
///     .stream_out([c.handle()]);
/// s0.execute().unwrap();
/// assert_eq!(*c.read(), *a.read());
/// ```
pub struct TaskSchedule<T> {
    name: String,
    tasks: Vec<Task<T>>,
    stream_in: Vec<BufferRef<T>>,
    stream_out: Vec<BufferRef<T>>,
    device: Option<Device>,
    arena: HashMap<BufferId, Vec<T>>,
}

impl<T> std::fmt::Debug for TaskSchedule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids = |v: &[BufferRef<T>]| v.iter().map(|b| b.id()).collect::<Vec<_>>();
        f.debug_struct("TaskSchedule")
            .field("name", &self.name)
            .field("tasks", &self.tasks.iter().map(|t| &t.name).collect::<Vec<_>>())
            .field("stream_in", &ids(&self.stream_in))
            .field("stream_out", &ids(&self.stream_out))
            .field("device", &self.device)
            .field("resident", &self.arena.len())
            .finish()
    }
}

impl<T: Scalar> TaskSchedule<T> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            tasks: Vec::new(),
            stream_in: Vec::new(),
            stream_out: Vec::new(),
            device: None,
            arena: HashMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Bound device; `None` until the first [`execute`](Self::execute) or [`migrate`](Self::migrate).
    pub fn device(&self) -> Option<&Device> {
        self.device.as_ref()
    }

    /// Whether the device arena currently holds a copy of `id`.
    pub fn is_resident(&self, id: BufferId) -> bool {
        self.arena.contains_key(&id)
    }

    /// Marks buffers for host-to-device copy on every execute.
    pub fn stream_in(mut self, buffers: impl IntoIterator<Item = BufferRef<T>>) -> Self {
        push_unique(&mut self.stream_in, buffers);
        self
    }

    /// Marks buffers for device-to-host copy after every execute.
    pub fn stream_out(mut self, buffers: impl IntoIterator<Item = BufferRef<T>>) -> Self {
        push_unique(&mut self.stream_out, buffers);
        self
    }

    pub fn task(mut self, name: impl Into<String>, kernel: Kernel<T>, args: Vec<Arg<T>>) -> Result<Self> {
        let name = name.into();
        if args.len() != kernel.arity() {
            return Err(self.error(format!(
                "task `{name}`: kernel `{}` takes {} arguments, got {}",
                kernel.name(),
                kernel.arity(),
                args.len()
            )));
        }
        for (pos, (arg, want)) in args.iter().zip(kernel.params()).enumerate() {
            if arg.param() != *want {
                return Err(self.error(format!(
                    "task `{name}`: argument {pos} should be {want:?}, got {:?}",
                    arg.param()
                )));
            }
        }
        self.tasks.push(Task { name, kernel, args });
        Ok(self)
    }

    /// Builder form of [`migrate`](Self::migrate).
    pub fn on(mut self, device: Device) -> Self {
        self.migrate(device);
        self
    }

    /// Rebinds to `device`. A different device starts with an empty arena, so
    /// the next execute copies every argument again.
    pub fn migrate(&mut self, device: Device) {
        if self.device.as_ref().map(Device::id) == Some(device.id()) {
            return;
        }
        self.device = Some(device);
        self.arena.clear();
    }

    /// Copy-in, run every task in order, copy-out.
    pub fn execute(&mut self) -> Result<ExecutionTiming> {
        self.validate()?;
        let device = self.device.get_or_insert_with(Device::serial).clone();

        // First and last task touching each buffer, in first-use order.
        let mut order: Vec<BufferRef<T>> = Vec::new();
        let mut span: HashMap<BufferId, (usize, usize)> = HashMap::new();
        for (t, task) in self.tasks.iter().enumerate() {
            for arg in &task.args {
                if let Arg::Buffer(b) = arg {
                    span.entry(b.id())
                        .and_modify(|s| s.1 = t)
                        .or_insert_with(|| {
                            order.push(b.clone());
                            (t, t)
                        });
                }
            }
        }

        let mut timing = ExecutionTiming {
            total: PhaseTiming::default(),
            tasks: self
                .tasks
                .iter()
                .map(|t| TaskTiming {
                    name: t.name.clone(),
                    phases: PhaseTiming::default(),
                })
                .collect(),
        };

        let streamed: HashSet<BufferId> = self.stream_in.iter().map(|b| b.id()).collect();
        for buffer in &order {
            let id = buffer.id();
            if !streamed.contains(&id) && self.arena.contains_key(&id) {
                continue;
            }
            let start = Instant::now();
            buffer.copy_to_device(self.arena.entry(id).or_default());
            timing.tasks[span[&id].0].phases.copy_in += start.elapsed();
        }

        for (t, task) in self.tasks.iter().enumerate() {
            let mut views = Vec::with_capacity(task.args.len());
            for arg in &task.args {
                views.push(match arg {
                    Arg::Buffer(b) => DeviceArg::Buffer(RawBuffer::new(
                        self.arena.get_mut(&b.id()).expect("argument copied in"),
                    )),
                    Arg::Scalar(v) => DeviceArg::Scalar(*v),
                    Arg::Count(n) => DeviceArg::Count(*n),
                });
            }
            let start = Instant::now();
            device.dispatch(&task.kernel, &views);
            timing.tasks[t].phases.kernel += start.elapsed();
        }

        for buffer in &self.stream_out {
            let id = buffer.id();
            let start = Instant::now();
            buffer.copy_from_device(&self.arena[&id]);
            timing.tasks[span[&id].1].phases.copy_out += start.elapsed();
        }

        for task in &timing.tasks {
            timing.total.accumulate(&task.phases);
        }
        Ok(timing)
    }

    fn validate(&self) -> Result<()> {
        let args: HashSet<BufferId> = self
            .tasks
            .iter()
            .flat_map(|t| t.args.iter())
            .filter_map(|a| match a {
                Arg::Buffer(b) => Some(b.id()),
                _ => None,
            })
            .collect();
        for (set, label) in [(&self.stream_in, "stream_in"), (&self.stream_out, "stream_out")] {
            if let Some(b) = set.iter().find(|b| !args.contains(&b.id())) {
                return Err(self.error(format!("{label} buffer {} is not a task argument", b.id())));
            }
        }
        Ok(())
    }

    fn error(&self, message: String) -> Error {
        Error::Schedule {
            schedule: self.name.clone(),
            message,
        }
    }
}

fn push_unique<T>(set: &mut Vec<BufferRef<T>>, buffers: impl IntoIterator<Item = BufferRef<T>>) {
    for b in buffers {
        if set.iter().all(|x| x.id() != b.id()) {
            set.push(b);
        }
    }
}
