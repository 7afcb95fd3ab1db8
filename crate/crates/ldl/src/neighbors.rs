//! Distribution-averaging k-nearest neighbors: a lazy learner that predicts
//! the mean label distribution of the `k` training examples closest in
//! Euclidean distance, with exact linear-scan search.

use crate::data::{FeatureVector, LabelDistribution, LdlDataset, Predictor};
use crate::error::{LdlError, Result};

/// Stored training set plus the neighbor count `k`. Ties at the k-th
/// distance break toward the lowest training index.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    training: LdlDataset,
    k: usize,
}

impl KnnModel {
    /// Store the dataset verbatim; no training computation happens.
    pub fn fit(training: LdlDataset, k: usize) -> Result<Self> {
        if k == 0 || k > training.n() {
            return Err(LdlError::BadK { k, n: training.n() });
        }
        Ok(Self { training, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn training(&self) -> &LdlDataset {
        &self.training
    }

    /// Indices of the `k` nearest training examples, ordered by
    /// `(distance, index)`.
    pub fn neighbors(&self, x: &FeatureVector) -> Result<Vec<usize>> {
        if x.len() != self.training.q() {
            return Err(LdlError::DimensionMismatch {
                context: format!(
                    "query has {} features, training set has {}",
                    x.len(),
                    self.training.q()
                ),
            });
        }
        let mut scored: Vec<(f64, usize)> = self
            .training
            .features()
            .iter()
            .enumerate()
            .map(|(i, t)| (squared_euclidean(x.values(), t.values()), i))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(scored.iter().take(self.k).map(|&(_, i)| i).collect())
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum()
}

impl Predictor for KnnModel {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
        let neighbors = self.neighbors(x)?;
        let c = self.training.c();
        let mut degrees = vec![0.0; c];
        for &i in &neighbors {
            for (acc, &d) in degrees.iter_mut().zip(self.training.targets()[i].degrees()) {
                *acc += d;
            }
        }
        for d in &mut degrees {
            *d /= self.k as f64;
        }
        LabelDistribution::new(degrees)
    }

    fn label_count(&self) -> usize {
        self.training.c()
    }

    fn feature_count(&self) -> usize {
        self.training.q()
    }

    fn algorithm(&self) -> &str {
        "aa-knn"
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![("k".to_string(), self.k.to_string())]
    }
}
