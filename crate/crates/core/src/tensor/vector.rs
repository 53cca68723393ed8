use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{SeededRng, Storage};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector<T> {
    data: Vec<T>,
}

impl<T: Scalar> DenseVector<T> {
    pub fn new(len: usize, fill: T) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroDimension { rows: 1, cols: 0 });
        }
        Ok(Self {
            data: vec![fill; len],
        })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(len, T::zero())
    }

    /// Wraps an existing buffer. Empty buffers are allowed here, unlike [`DenseVector::new`].
    pub fn from_vec(data: Vec<T>) -> Self {
        Self { data }
    }

    pub fn one_hot(len: usize, hot: usize) -> Result<Self> {
        if hot >= len {
            return Err(Error::shape("one_hot", format!("index < {len}"), hot));
        }
        let mut v = Self::zeros(len)?;
        v.data[hot] = T::one();
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, v: T) {
        self.data[i] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// Index of the largest element; ties go to the lowest index.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, &v) in self.data.iter().enumerate() {
            match best {
                Some((_, b)) if v <= b => {}
                _ => best = Some((i, v)),
            }
        }
        best.map(|(i, _)| i)
    }

    /// Same contract as [`super::DenseMatrix::random_fill`].
    pub fn random_fill(&mut self, rng: &mut SeededRng, lo: T, hi: T) -> Result<()> {
        super::matrix::fill_uniform(&mut self.data, rng, lo, hi)
    }
}

impl<T> Storage<T> for DenseVector<T> {
    fn as_slice(&self) -> &[T] {
        &self.data
    }

    fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }
}
