use crate::error::{Error, Result};
use crate::runtime::{Arg, BufferId, Device, ExecutionTiming, Shared, TaskSchedule};
use crate::scalar::Scalar;
use crate::tensor::{DenseMatrix, DenseVector, SeededRng, Storage};

use super::kernels;
use super::state::{layer_accessors, LayerState};
use super::LearningRate;

/// Schedule wiring: which downstream buffers and step size the kernel was bound to.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Wiring<T> {
    next_weights: BufferId,
    next_deltas: BufferId,
    eta: T,
}

/// Fully connected layer with tanh activation.
#[derive(Debug)]
pub struct FullyConnectedLayer<T: Scalar> {
    state: LayerState<T>,
    device: Device,
    schedule: Option<TaskSchedule<T>>,
    wiring: Option<Wiring<T>>,
}

impl<T: Scalar> FullyConnectedLayer<T> {
    pub fn new(cols_input: usize, cols_out: usize, rng: &mut SeededRng) -> Result<Self> {
        Ok(Self::from_state(LayerState::new(cols_input, cols_out, rng)?))
    }

    /// `weights` is `cols_input × cols_out`.
    pub fn with_weights(weights: DenseMatrix<T>, biases: DenseVector<T>) -> Result<Self> {
        Ok(Self::from_state(LayerState::with_weights(weights, biases)?))
    }

    fn from_state(state: LayerState<T>) -> Self {
        Self {
            state,
            device: Device::serial(),
            schedule: None,
            wiring: None,
        }
    }

    layer_accessors!();

    pub fn forward(&mut self, input: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.state.compute_netin(input, "forward_fc")?;
        let mut outputs = self.state.outputs.write();
        for (a, &z) in outputs.as_mut_slice().iter_mut().zip(self.state.netin.as_slice()) {
            *a = z.tanh();
        }
        Ok(outputs.clone())
    }

    /// Runs the backward kernel against the downstream layer's weights
    /// (`cols_out × next_cols`) and deltas. Requires a forward pass for the
    /// current sample and a completed backward pass of the downstream layer.
    pub fn backward(
        &mut self,
        next_weights: &Shared<DenseMatrix<T>>,
        next_deltas: &Shared<DenseVector<T>>,
        eta: LearningRate<T>,
    ) -> Result<ExecutionTiming> {
        let (rows, next_cols) = {
            let w = next_weights.read();
            (w.rows(), w.cols())
        };
        if rows != self.state.cols_out {
            return Err(Error::shape("backward_fc next_weights rows", self.state.cols_out, rows));
        }
        let next_len = next_deltas.read().len();
        if next_len != next_cols {
            return Err(Error::shape("backward_fc next_deltas", next_cols, next_len));
        }

        let wiring = Wiring {
            next_weights: next_weights.id(),
            next_deltas: next_deltas.id(),
            eta: eta.get(),
        };
        if self.wiring != Some(wiring) {
            self.schedule = Some(self.build_schedule(next_weights, next_deltas, next_cols, eta)?);
            self.wiring = Some(wiring);
        }
        self.schedule.as_mut().expect("schedule built").execute()
    }

    fn build_schedule(
        &self,
        next_weights: &Shared<DenseMatrix<T>>,
        next_deltas: &Shared<DenseVector<T>>,
        next_cols: usize,
        eta: LearningRate<T>,
    ) -> Result<TaskSchedule<T>> {
        let s = &self.state;
        let args: Vec<Arg<T>> = vec![
            (&s.deltas).into(),
            (&s.inputs).into(),
            (&s.gradients).into(),
            (&s.delta_weights).into(),
            (&s.delta_biases).into(),
            (&s.outputs).into(),
            next_weights.into(),
            next_deltas.into(),
            Arg::Count(s.cols_out),
            Arg::Count(s.cols_input),
            Arg::Count(next_cols),
            Arg::Scalar(eta.get()),
        ];
        Ok(TaskSchedule::new("FullyConnectedLayer")
            .on(self.device.clone())
            .stream_in([
                s.inputs.handle(),
                s.outputs.handle(),
                next_weights.handle(),
                next_deltas.handle(),
            ])
            .task("backward", kernels::fc_backward(s.cols_out, s.cols_input), args)?
            .stream_out([
                s.deltas.handle(),
                s.gradients.handle(),
                s.delta_weights.handle(),
                s.delta_biases.handle(),
            ]))
    }

    /// Independent deep copy, bound to the same device, with no schedule yet.
    pub fn duplicate(&self) -> Self {
        Self::from_state(self.state.duplicate()).bound(self.device.clone())
    }

    fn bound(mut self, device: Device) -> Self {
        self.device = device;
        self
    }
}
