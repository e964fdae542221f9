use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse real vector with strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Entries must be sorted by index without duplicates.
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Invalid(
                "sparse entries must be strictly increasing".into(),
            ));
        }
        if entries.last().is_some_and(|&(i, _)| i >= dim) {
            return Err(Error::DimensionMismatch(format!("index beyond dimension {dim}")));
        }
        let (indices, values) = entries.into_iter().unzip();
        Ok(SparseVector { dim, indices, values })
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let dim = values.len();
        let (indices, values) = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        SparseVector { dim, indices, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(k) => self.values[k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Squared Euclidean distance, summed over the union of supports in
    /// index order.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        self.fold_differences(other, |d| d * d)
    }

    pub fn l1_distance(&self, other: &SparseVector) -> f64 {
        self.fold_differences(other, f64::abs)
    }

    fn fold_differences(&self, other: &SparseVector, f: impl Fn(f64) -> f64) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        loop {
            let d = match (self.indices.get(a), other.indices.get(b)) {
                (None, None) => break,
                (Some(i), Some(j)) if i == j => {
                    a += 1;
                    b += 1;
                    self.values[a - 1] - other.values[b - 1]
                }
                (Some(i), Some(j)) if i < j => {
                    a += 1;
                    self.values[a - 1]
                }
                (Some(_), None) => {
                    a += 1;
                    self.values[a - 1]
                }
                _ => {
                    b += 1;
                    other.values[b - 1]
                }
            };
            acc += f(d);
        }
        acc
    }
}
