use crate::error::{Error, Result};
use crate::runtime::{Arg, Device, ExecutionTiming, Shared, TaskSchedule};
use crate::scalar::Scalar;
use crate::tensor::{DenseMatrix, DenseVector, SeededRng, Storage};

use super::kernels;
use super::state::{layer_accessors, LayerState};
use super::LearningRate;

/// Numerically stable softmax: `exp(z - max z) / sum exp(z - max z)`.
pub fn softmax_into<T: Scalar>(logits: &[T], out: &mut [T]) {
    assert_eq!(logits.len(), out.len(), "softmax_into length mismatch");
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for (o, &z) in out.iter_mut().zip(logits) {
        *o = (z - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o = *o / sum;
    }
}

/// Output layer: affine map followed by softmax, trained with cross-entropy.
#[derive(Debug)]
pub struct SoftmaxOutputLayer<T: Scalar> {
    state: LayerState<T>,
    target: Shared<DenseVector<T>>,
    device: Device,
    schedule: Option<TaskSchedule<T>>,
    schedule_eta: Option<T>,
}

impl<T: Scalar> SoftmaxOutputLayer<T> {
    pub fn new(cols_input: usize, cols_out: usize, rng: &mut SeededRng) -> Result<Self> {
        Self::from_state(LayerState::new(cols_input, cols_out, rng)?)
    }

    /// `weights` is `cols_input × cols_out`.
    pub fn with_weights(weights: DenseMatrix<T>, biases: DenseVector<T>) -> Result<Self> {
        Self::from_state(LayerState::with_weights(weights, biases)?)
    }

    fn from_state(state: LayerState<T>) -> Result<Self> {
        let target = Shared::new(DenseVector::zeros(state.cols_out)?);
        Ok(Self {
            state,
            target,
            device: Device::serial(),
            schedule: None,
            schedule_eta: None,
        })
    }

    layer_accessors!();

    pub fn forward(&mut self, input: &DenseVector<T>) -> Result<DenseVector<T>> {
        self.state.compute_netin(input, "forward_softmax")?;
        let mut outputs = self.state.outputs.write();
        softmax_into(self.state.netin.as_slice(), outputs.as_mut_slice());
        Ok(outputs.clone())
    }

    /// Runs the backward kernel for a one-hot `target` on the bound device.
    /// Requires a forward pass for the current sample.
    pub fn backward(&mut self, target: &DenseVector<T>, eta: LearningRate<T>) -> Result<ExecutionTiming> {
        if target.len() != self.state.cols_out {
            return Err(Error::shape("backward_softmax_output", self.state.cols_out, target.len()));
        }
        self.target
            .write()
            .as_mut_slice()
            .copy_from_slice(target.as_slice());
        if self.schedule_eta != Some(eta.get()) {
            self.schedule = Some(self.build_schedule(eta)?);
            self.schedule_eta = Some(eta.get());
        }
        self.schedule.as_mut().expect("schedule built").execute()
    }

    fn build_schedule(&self, eta: LearningRate<T>) -> Result<TaskSchedule<T>> {
        let s = &self.state;
        let args: Vec<Arg<T>> = vec![
            (&s.deltas).into(),
            (&s.inputs).into(),
            (&s.gradients).into(),
            (&s.delta_weights).into(),
            (&s.delta_biases).into(),
            (&s.outputs).into(),
            (&self.target).into(),
            Arg::Count(s.cols_out),
            Arg::Count(s.cols_input),
            Arg::Scalar(eta.get()),
        ];
        Ok(TaskSchedule::new("SoftmaxOutputLayer")
            .on(self.device.clone())
            .stream_in([s.inputs.handle(), s.outputs.handle(), self.target.handle()])
            .task("backward", kernels::softmax_backward(s.cols_out, s.cols_input), args)?
            .stream_out([
                s.deltas.handle(),
                s.gradients.handle(),
                s.delta_weights.handle(),
                s.delta_biases.handle(),
            ]))
    }

    /// Independent deep copy, bound to the same device, with no schedule yet.
    pub fn duplicate(&self) -> Self {
        Self {
            state: self.state.duplicate(),
            target: self.target.duplicate(),
            device: self.device.clone(),
            schedule: None,
            schedule_eta: None,
        }
    }
}
