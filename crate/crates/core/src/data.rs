//! Delimited datasets with one-hot labels.
//!
//! One sample per line: `feature_width` decimal features followed by
//! `class_count` label fields, comma separated. Blank lines are ignored.
//!
//! ```text
//! 0.1,0.2,0.3,0.4,1,0,0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{DenseVector, SeededRng, Storage};

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub features: DenseVector<T>,
    pub label: DenseVector<T>,
}

impl<T: Scalar> Sample<T> {
    pub fn class(&self) -> usize {
        self.label.argmax().expect("labels are non-empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSet<T> {
    feature_width: usize,
    class_count: usize,
    items: Vec<Sample<T>>,
}

impl<T: Scalar> DataSet<T> {
    pub fn new(feature_width: usize, class_count: usize) -> Result<Self> {
        if feature_width == 0 || class_count == 0 {
            return Err(Error::Config(format!(
                "dataset needs positive widths, got {feature_width} features and {class_count} classes"
            )));
        }
        Ok(Self {
            feature_width,
            class_count,
            items: Vec::new(),
        })
    }

    fn empty_like(&self) -> Self {
        Self {
            feature_width: self.feature_width,
            class_count: self.class_count,
            items: Vec::new(),
        }
    }

    pub fn feature_width(&self) -> usize {
        self.feature_width
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Sample<T>] {
        &self.items
    }

    pub fn push(&mut self, sample: Sample<T>) -> Result<()> {
        if sample.features.len() != self.feature_width {
            return Err(Error::shape("sample features", self.feature_width, sample.features.len()));
        }
        if sample.label.len() != self.class_count {
            return Err(Error::shape("sample label", self.class_count, sample.label.len()));
        }
        check_one_hot(sample.label.as_slice()).map_err(|message| Error::Label {
            line: self.items.len() + 1,
            message,
        })?;
        self.items.push(sample);
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, feature_width: usize, class_count: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, feature_width, class_count)
    }

    pub fn parse(text: &str, feature_width: usize, class_count: usize) -> Result<Self> {
        let mut set = Self::new(feature_width, class_count)?;
        let width = feature_width + class_count;
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != width {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {width} fields, found {}", fields.len()),
                });
            }
            let values = fields
                .iter()
                .map(|f| {
                    f.parse::<T>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("`{f}` is not a number"),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            let (features, label) = values.split_at(feature_width);
            check_one_hot(label).map_err(|message| Error::Label {
                line: line_no,
                message,
            })?;
            set.items.push(Sample {
                features: DenseVector::from_vec(features.to_vec()),
                label: DenseVector::from_vec(label.to_vec()),
            });
        }
        Ok(set)
    }

    /// Same format as [`DataSet::load`]; features use the shortest exact decimal form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            let mut first = true;
            for v in item.features.iter() {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{v}").expect("write to String");
            }
            for v in item.label.iter() {
                out.push_str(if *v == T::one() { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Seeded shuffle, then the first `floor(train_fraction * n)` items go to
    /// the training set and the rest to the test set.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::Range(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.shuffle(&mut SeededRng::new(seed));
        let cut = (train_fraction * self.items.len() as f64).floor() as usize;
        let (mut train, mut test) = (self.empty_like(), self.empty_like());
        for (rank, &i) in order.iter().enumerate() {
            let dst = if rank < cut { &mut train } else { &mut test };
            dst.items.push(self.items[i].clone());
        }
        Ok((train, test))
    }

    /// `factor` passes over the data; every replica's features get uniform
    /// noise in `[-noise, noise]`, clamped to `[0, 1]`. Labels are copied.
    pub fn enlarge(&self, factor: usize, noise: f64, rng: &mut SeededRng) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Range("enlarge factor must be at least 1".into()));
        }
        if noise.is_nan() || noise < 0.0 {
            return Err(Error::Range(format!("noise must be non-negative, got {noise}")));
        }
        let mut out = self.empty_like();
        out.items.reserve(factor * self.items.len());
        for _ in 0..factor {
            for item in &self.items {
                let mut features = item.features.clone();
                if noise > 0.0 {
                    for v in features.as_mut_slice() {
                        let x = v.as_f64();
                        let lo = (x - noise).max(0.0);
                        let hi = (x + noise).min(1.0);
                        let jitter = x + (2.0 * rng.next_unit() - 1.0) * noise;
                        *v = T::of(jitter.clamp(lo.min(hi), hi.max(lo)));
                    }
                }
                out.items.push(Sample {
                    features,
                    label: item.label.clone(),
                });
            }
        }
        Ok(out)
    }

    /// Random features in `[0, 1)` with labels cycling through the classes.
    pub fn synthetic(feature_width: usize, class_count: usize, len: usize, rng: &mut SeededRng) -> Result<Self> {
        let mut set = Self::new(feature_width, class_count)?;
        for n in 0..len {
            let mut features = DenseVector::zeros(feature_width)?;
            features.random_fill(rng, T::zero(), T::one())?;
            set.items.push(Sample {
                features,
                label: DenseVector::one_hot(class_count, n % class_count)?,
            });
        }
        Ok(set)
    }

    pub fn class_histogram(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for item in &self.items {
            counts[item.class()] += 1;
        }
        counts
    }
}

fn check_one_hot<T: Scalar>(label: &[T]) -> std::result::Result<(), String> {
    let mut hot = 0;
    for v in label {
        if *v == T::one() {
            hot += 1;
        } else if *v != T::zero() {
            return Err(format!("field value {v} is neither 0 nor 1"));
        }
    }
    if hot == 1 {
        Ok(())
    } else {
        Err(format!("{hot} fields set, expected exactly one"))
    }
}
