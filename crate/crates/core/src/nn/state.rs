use crate::error::{Error, Result};
use crate::runtime::Shared;
use crate::scalar::Scalar;
use crate::tensor::{DenseMatrix, DenseVector, SeededRng, Storage};

/// Buffers shared by both layer kinds. Matrices are `cols_input × cols_out`.
#[derive(Debug)]
pub(crate) struct LayerState<T> {
    pub cols_input: usize,
    pub cols_out: usize,
    pub weights: Shared<DenseMatrix<T>>,
    pub biases: Shared<DenseVector<T>>,
    pub inputs: Shared<DenseVector<T>>,
    pub netin: DenseVector<T>,
    pub outputs: Shared<DenseVector<T>>,
    pub deltas: Shared<DenseVector<T>>,
    pub gradients: Shared<DenseMatrix<T>>,
    pub delta_weights: Shared<DenseMatrix<T>>,
    pub delta_biases: Shared<DenseVector<T>>,
}

impl<T: Scalar> LayerState<T> {
    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in))`, biases zero.
    pub fn new(cols_input: usize, cols_out: usize, rng: &mut SeededRng) -> Result<Self> {
        let mut weights = DenseMatrix::zeros(cols_input, cols_out)?;
        let bound = T::one() / T::of(cols_input as f64).sqrt();
        weights.random_fill(rng, -bound, bound)?;
        Self::with_weights(weights, DenseVector::zeros(cols_out)?)
    }

    pub fn with_weights(weights: DenseMatrix<T>, biases: DenseVector<T>) -> Result<Self> {
        let (cols_input, cols_out) = (weights.rows(), weights.cols());
        if biases.len() != cols_out {
            return Err(Error::shape("layer biases", cols_out, biases.len()));
        }
        Ok(Self {
            cols_input,
            cols_out,
            weights: Shared::new(weights),
            biases: Shared::new(biases),
            inputs: Shared::new(DenseVector::zeros(cols_input)?),
            netin: DenseVector::zeros(cols_out)?,
            outputs: Shared::new(DenseVector::zeros(cols_out)?),
            deltas: Shared::new(DenseVector::zeros(cols_out)?),
            gradients: Shared::new(DenseMatrix::zeros(cols_input, cols_out)?),
            delta_weights: Shared::new(DenseMatrix::zeros(cols_input, cols_out)?),
            delta_biases: Shared::new(DenseVector::zeros(cols_out)?),
        })
    }

    /// Caches `input` and computes `netin[j] = sum_i input[i] * w[i][j] + b[j]`,
    /// summing in ascending `i`.
    pub fn compute_netin(&mut self, input: &DenseVector<T>, context: &'static str) -> Result<()> {
        if input.len() != self.cols_input {
            return Err(Error::shape(context, self.cols_input, input.len()));
        }
        self.inputs
            .write()
            .as_mut_slice()
            .copy_from_slice(input.as_slice());

        let netin = self.netin.as_mut_slice();
        netin.fill(T::zero());
        let weights = self.weights.read();
        for (i, &x) in input.iter().enumerate() {
            for (acc, &w) in netin.iter_mut().zip(weights.row(i)) {
                *acc += x * w;
            }
        }
        for (acc, &b) in netin.iter_mut().zip(self.biases.read().as_slice()) {
            *acc += b;
        }
        Ok(())
    }

    pub fn apply_updates(&self) {
        add_assign(self.weights.write().as_mut_slice(), self.delta_weights.read().as_slice());
        add_assign(self.biases.write().as_mut_slice(), self.delta_biases.read().as_slice());
    }

    pub fn duplicate(&self) -> Self {
        Self {
            cols_input: self.cols_input,
            cols_out: self.cols_out,
            weights: self.weights.duplicate(),
            biases: self.biases.duplicate(),
            inputs: self.inputs.duplicate(),
            netin: self.netin.clone(),
            outputs: self.outputs.duplicate(),
            deltas: self.deltas.duplicate(),
            gradients: self.gradients.duplicate(),
            delta_weights: self.delta_weights.duplicate(),
            delta_biases: self.delta_biases.duplicate(),
        }
    }
}

fn add_assign<T: Scalar>(dst: &mut [T], delta: &[T]) {
    for (d, &x) in dst.iter_mut().zip(delta) {
        *d += x;
    }
}

/// Generates the accessors both layer types expose over their `state`.
macro_rules! layer_accessors {
    () => {
        pub fn cols_input(&self) -> usize {
            self.state.cols_input
        }

        pub fn cols_out(&self) -> usize {
            self.state.cols_out
        }

        pub fn weights(&self) -> &crate::runtime::Shared<crate::tensor::DenseMatrix<T>> {
            &self.state.weights
        }

        pub fn biases(&self) -> &crate::runtime::Shared<crate::tensor::DenseVector<T>> {
            &self.state.biases
        }

        /// Input of the last forward pass.
        pub fn inputs(&self) -> &crate::runtime::Shared<crate::tensor::DenseVector<T>> {
            &self.state.inputs
        }

        pub fn netin(&self) -> &crate::tensor::DenseVector<T> {
            &self.state.netin
        }

        pub fn outputs(&self) -> &crate::runtime::Shared<crate::tensor::DenseVector<T>> {
            &self.state.outputs
        }

        pub fn deltas(&self) -> &crate::runtime::Shared<crate::tensor::DenseVector<T>> {
            &self.state.deltas
        }

        pub fn gradients(&self) -> &crate::runtime::Shared<crate::tensor::DenseMatrix<T>> {
            &self.state.gradients
        }

        pub fn delta_weights(&self) -> &crate::runtime::Shared<crate::tensor::DenseMatrix<T>> {
            &self.state.delta_weights
        }

        pub fn delta_biases(&self) -> &crate::runtime::Shared<crate::tensor::DenseVector<T>> {
            &self.state.delta_biases
        }

        /// `weights += delta_weights`, `biases += delta_biases`. Additive: calling
        /// twice without a new backward pass applies the step twice.
        pub fn apply_updates(&self) {
            self.state.apply_updates()
        }

        /// Rebinds the backward schedule to `device`.
        pub fn bind(&mut self, device: crate::runtime::Device) {
            if let Some(schedule) = &mut self.schedule {
                schedule.migrate(device.clone());
            }
            self.device = device;
        }

        pub fn device(&self) -> &crate::runtime::Device {
            &self.device
        }
    };
}

pub(crate) use layer_accessors;
