use std::time::Duration;

/// Wall time of the three execute phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTiming {
    pub copy_in: Duration,
    pub kernel: Duration,
    pub copy_out: Duration,
}

fn ms(d: Duration) -> f64 {
    d.as_nanos() as f64 / 1e6
}

impl PhaseTiming {
    pub fn total(&self) -> Duration {
        self.copy_in + self.kernel + self.copy_out
    }

    pub fn copy_in_ms(&self) -> f64 {
        ms(self.copy_in)
    }

    pub fn kernel_ms(&self) -> f64 {
        ms(self.kernel)
    }

    pub fn copy_out_ms(&self) -> f64 {
        ms(self.copy_out)
    }

    pub fn total_ms(&self) -> f64 {
        ms(self.total())
    }

    pub fn accumulate(&mut self, other: &PhaseTiming) {
        self.copy_in += other.copy_in;
        self.kernel += other.kernel;
        self.copy_out += other.copy_out;
    }
}

#[derive(Debug, Clone)]
pub struct TaskTiming {
    pub name: String,
    pub phases: PhaseTiming,
}

/// Timing of one execute call.
///
/// A buffer's copy-in is charged to the first task that takes it as an
/// argument and its copy-out to the last one, so the per-task phases add up to
/// [`ExecutionTiming::total`].
#[derive(Debug, Clone, Default)]
pub struct ExecutionTiming {
    pub total: PhaseTiming,
    pub tasks: Vec<TaskTiming>,
}

impl ExecutionTiming {
    pub fn task(&self, name: &str) -> Option<&PhaseTiming> {
        self.tasks.iter().find(|t| t.name == name).map(|t| &t.phases)
    }
}
