use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{SeededRng, Storage};

/// Row-major matrix: element `(i, j)` lives at `i * cols + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, fill: T) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension { rows, cols });
        }
        Ok(Self {
            rows,
            cols,
            data: vec![fill; rows * cols],
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, T::zero())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, T::one());
        }
        Ok(m)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::shape(
                "DenseMatrix::from_vec",
                rows * cols,
                data.len(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Reference product. The inner sum runs in ascending `k`, starting from zero.
    pub fn matmul(&self, other: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if self.cols != other.rows {
            return Err(Error::shape(
                "matmul",
                format!("rhs rows = {}", self.cols),
                other.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut sum = T::zero();
                for k in 0..self.cols {
                    sum += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, sum);
            }
        }
        Ok(out)
    }

    /// Fills with uniform draws from `[lo, hi)`, consuming the stream in row-major order.
    pub fn random_fill(&mut self, rng: &mut SeededRng, lo: T, hi: T) -> Result<()> {
        fill_uniform(&mut self.data, rng, lo, hi)
    }
}

pub(super) fn fill_uniform<T: Scalar>(
    data: &mut [T],
    rng: &mut SeededRng,
    lo: T,
    hi: T,
) -> Result<()> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Range(format!("random_fill needs lo < hi, got [{lo}, {hi})")));
    }
    let (lo64, span) = (lo.as_f64(), hi.as_f64() - lo.as_f64());
    for slot in data.iter_mut() {
        // Narrowing to T can round onto `hi`; redraw in that case.
        *slot = loop {
            let v = T::of(lo64 + rng.next_unit() * span);
            if v < hi {
                break v;
            }
        };
    }
    Ok(())
}

impl<T> Storage<T> for DenseMatrix<T> {
    fn as_slice(&self) -> &[T] {
        &self.data
    }

    fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }
}
