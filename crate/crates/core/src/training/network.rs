use std::collections::hash_map::DefaultHasher;
use std::hash::Hasher;

use crate::error::{Error, Result};
use crate::nn::{FullyConnectedLayer, LearningRate, SoftmaxOutputLayer};
use crate::runtime::{Device, ExecutionTiming};
use crate::scalar::Scalar;
use crate::tensor::{DenseVector, SeededRng, Storage};

use super::loss::cross_entropy;

/// Input, zero or more tanh hidden layers, softmax output.
#[derive(Debug)]
pub struct FeedForwardNetwork<T: Scalar> {
    input_width: usize,
    hidden: Vec<FullyConnectedLayer<T>>,
    output: SoftmaxOutputLayer<T>,
}

/// Per-layer timing of one backward pass.
#[derive(Debug, Clone, Default)]
pub struct BackwardTiming {
    pub output: ExecutionTiming,
    /// Indexed like [`FeedForwardNetwork::hidden`].
    pub hidden: Vec<ExecutionTiming>,
}

impl<T: Scalar> FeedForwardNetwork<T> {
    /// Chains the layers and initializes weights from `rng`, first layer first.
    pub fn build(
        input_width: usize,
        hidden_sizes: &[usize],
        classes: usize,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if input_width == 0 {
            return Err(Error::Construction("input width must be at least 1".into()));
        }
        if classes < 2 {
            return Err(Error::Construction(format!("need at least 2 classes, got {classes}")));
        }
        if let Some(pos) = hidden_sizes.iter().position(|&n| n == 0) {
            return Err(Error::Construction(format!("hidden layer {pos} has no neurons")));
        }
        let mut hidden = Vec::with_capacity(hidden_sizes.len());
        let mut width = input_width;
        for &n in hidden_sizes {
            hidden.push(FullyConnectedLayer::new(width, n, rng)?);
            width = n;
        }
        let output = SoftmaxOutputLayer::new(width, classes, rng)?;
        Ok(Self {
            input_width,
            hidden,
            output,
        })
    }

    /// Assembles pre-built layers, checking that their shapes chain.
    pub fn from_layers(
        input_width: usize,
        hidden: Vec<FullyConnectedLayer<T>>,
        output: SoftmaxOutputLayer<T>,
    ) -> Result<Self> {
        let mut width = input_width;
        for (n, layer) in hidden.iter().enumerate() {
            if layer.cols_input() != width {
                return Err(Error::Construction(format!(
                    "hidden layer {n} takes {} inputs, previous layer gives {width}",
                    layer.cols_input()
                )));
            }
            width = layer.cols_out();
        }
        if output.cols_input() != width {
            return Err(Error::Construction(format!(
                "output layer takes {} inputs, previous layer gives {width}",
                output.cols_input()
            )));
        }
        if output.cols_out() < 2 {
            return Err(Error::Construction("output layer needs at least 2 classes".into()));
        }
        Ok(Self {
            input_width,
            hidden,
            output,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn classes(&self) -> usize {
        self.output.cols_out()
    }

    pub fn hidden(&self) -> &[FullyConnectedLayer<T>] {
        &self.hidden
    }

    pub fn hidden_mut(&mut self) -> &mut [FullyConnectedLayer<T>] {
        &mut self.hidden
    }

    pub fn output(&self) -> &SoftmaxOutputLayer<T> {
        &self.output
    }

    pub fn output_mut(&mut self) -> &mut SoftmaxOutputLayer<T> {
        &mut self.output
    }

    /// Class probabilities for `input`.
    pub fn forward(&mut self, input: &DenseVector<T>) -> Result<DenseVector<T>> {
        if input.len() != self.input_width {
            return Err(Error::shape("network input", self.input_width, input.len()));
        }
        let mut x = input.clone();
        for layer in &mut self.hidden {
            x = layer.forward(&x)?;
        }
        self.output.forward(&x)
    }

    /// Backward kernels from the output layer down to the first hidden layer.
    /// Updates are not applied.
    pub fn backward(&mut self, target: &DenseVector<T>, eta: LearningRate<T>) -> Result<BackwardTiming> {
        let output = self.output.backward(target, eta)?;
        let mut hidden = vec![ExecutionTiming::default(); self.hidden.len()];
        let mut next_weights = self.output.weights().clone();
        let mut next_deltas = self.output.deltas().clone();
        for (n, layer) in self.hidden.iter_mut().enumerate().rev() {
            hidden[n] = layer.backward(&next_weights, &next_deltas, eta)?;
            next_weights = layer.weights().clone();
            next_deltas = layer.deltas().clone();
        }
        Ok(BackwardTiming { output, hidden })
    }

    pub fn apply_updates(&self) {
        for layer in &self.hidden {
            layer.apply_updates();
        }
        self.output.apply_updates();
    }

    /// Forward, loss, backward, update. Returns the loss and the probabilities
    /// computed before the update.
    pub fn train_step(
        &mut self,
        input: &DenseVector<T>,
        target: &DenseVector<T>,
        eta: LearningRate<T>,
    ) -> Result<(T, DenseVector<T>)> {
        let predicted = self.forward(input)?;
        let loss = cross_entropy(&predicted, target)?;
        self.backward(target, eta)?;
        self.apply_updates();
        Ok((loss, predicted))
    }

    /// Moves every layer's backward schedule to `device`.
    pub fn bind(&mut self, device: &Device) {
        for layer in &mut self.hidden {
            layer.bind(device.clone());
        }
        self.output.bind(device.clone());
    }

    /// Independent deep copy of all parameters and buffers.
    pub fn duplicate(&self) -> Self {
        Self {
            input_width: self.input_width,
            hidden: self.hidden.iter().map(FullyConnectedLayer::duplicate).collect(),
            output: self.output.duplicate(),
        }
    }

    /// Hash of the bit patterns of every weight and bias.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        let mut feed = |xs: &[T]| {
            h.write_usize(xs.len());
            for x in xs {
                h.write_u64(x.bits());
            }
        };
        for layer in &self.hidden {
            feed(layer.weights().read().as_slice());
            feed(layer.biases().read().as_slice());
        }
        feed(self.output.weights().read().as_slice());
        feed(self.output.biases().read().as_slice());
        h.finish()
    }
}
