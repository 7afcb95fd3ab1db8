//! Domain types: label distributions, feature vectors, datasets, and the
//! predictor contract shared by every algorithm.
//!
//! A label distribution assigns each of `c` labels a description degree in
//! `[0, 1]`; the degrees sum to 1. Single-label and multi-label annotations
//! are degenerate distributions (all mass on one label, or mass split evenly
//! over a relevant set) and both conversions are provided here.

use std::collections::BTreeSet;

use crate::error::{LdlError, Result};

/// Tolerance accepted on input sums before rejecting a distribution.
pub const SUM_TOLERANCE: f64 = 1e-6;
/// Sums within this of 1 are kept bit-exact; larger deviations (up to
/// [`SUM_TOLERANCE`]) are renormalized to unit sum.
pub const SUM_EXACT: f64 = 1e-9;
/// Values more negative than this are errors; smaller noise is clamped to 0.
pub const NEGATIVE_FLOOR: f64 = -1e-12;
/// Floor applied to predicted probabilities before taking logarithms.
pub const LOG_CLAMP: f64 = 1e-12;

/// A vector of description degrees over `c` labels, each in `[0, 1]`,
/// summing to 1.
///
/// Construction validates the simplex invariants; inputs whose sum deviates
/// from 1 by at most [`SUM_TOLERANCE`] are silently renormalized to unit sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    degrees: Vec<f64>,
}

impl LabelDistribution {
    /// Validate `degrees` and build a distribution, renormalizing sums within
    /// [`SUM_TOLERANCE`] of 1.
    pub fn new(degrees: Vec<f64>) -> Result<Self> {
        if degrees.len() < 2 {
            return Err(LdlError::TooShort { c: degrees.len() });
        }
        let mut degrees = degrees;
        for (index, &value) in degrees.iter().enumerate() {
            if !value.is_finite() {
                return Err(LdlError::NonFiniteInput {
                    context: format!("degree {index} is {value}"),
                });
            }
            if value < NEGATIVE_FLOOR {
                return Err(LdlError::NegativeDegree { index, value });
            }
        }
        for value in &mut degrees {
            if *value < 0.0 {
                *value = 0.0;
            }
        }
        let sum: f64 = degrees.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(LdlError::BadSum { sum });
        }
        if (sum - 1.0).abs() > SUM_EXACT {
            for value in &mut degrees {
                *value /= sum;
            }
        }
        Ok(Self { degrees })
    }

    /// Distribution with all mass on label `index` (single-label annotation).
    pub fn from_single_label(index: usize, c: usize) -> Result<Self> {
        if c < 2 {
            return Err(LdlError::TooShort { c });
        }
        if index >= c {
            return Err(LdlError::IndexOutOfRange { index, c });
        }
        let mut degrees = vec![0.0; c];
        degrees[index] = 1.0;
        Ok(Self { degrees })
    }

    /// Distribution with degree `1/|set|` on each relevant label (multi-label
    /// annotation weighted by reciprocal cardinality).
    pub fn from_label_set(relevant: &[usize], c: usize) -> Result<Self> {
        if c < 2 {
            return Err(LdlError::TooShort { c });
        }
        let set: BTreeSet<usize> = relevant.iter().copied().collect();
        if set.is_empty() {
            return Err(LdlError::EmptySet);
        }
        if let Some(&index) = set.iter().find(|&&i| i >= c) {
            return Err(LdlError::IndexOutOfRange { index, c });
        }
        let share = 1.0 / set.len() as f64;
        let mut degrees = vec![0.0; c];
        for index in set {
            degrees[index] = share;
        }
        Ok(Self { degrees })
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of labels `c`.
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

/// A dense feature vector of length `q`. All values must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(LdlError::NonFiniteInput {
                context: format!("feature {index} is {value}"),
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Feature dimensionality `q`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A paired set of feature vectors (length `q`) and label distributions
/// (length `c`), optionally with label names.
#[derive(Debug, Clone, PartialEq)]
pub struct LdlDataset {
    features: Vec<FeatureVector>,
    targets: Vec<LabelDistribution>,
    label_names: Option<Vec<String>>,
    q: usize,
    c: usize,
}

impl LdlDataset {
    pub fn new(
        features: Vec<FeatureVector>,
        targets: Vec<LabelDistribution>,
        label_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if features.is_empty() || features.len() != targets.len() {
            return Err(LdlError::DimensionMismatch {
                context: format!(
                    "{} feature vectors vs {} distributions (need n >= 1, equal)",
                    features.len(),
                    targets.len()
                ),
            });
        }
        let q = features[0].len();
        let c = targets[0].len();
        for (i, x) in features.iter().enumerate() {
            if x.len() != q {
                return Err(LdlError::DimensionMismatch {
                    context: format!("feature vector {i} has length {} (expected {q})", x.len()),
                });
            }
        }
        for (i, d) in targets.iter().enumerate() {
            if d.len() != c {
                return Err(LdlError::DimensionMismatch {
                    context: format!("distribution {i} has {} labels (expected {c})", d.len()),
                });
            }
        }
        if let Some(names) = &label_names {
            if names.len() != c {
                return Err(LdlError::DimensionMismatch {
                    context: format!("{} label names for {c} labels", names.len()),
                });
            }
        }
        Ok(Self {
            features,
            targets,
            label_names,
            q,
            c,
        })
    }

    pub fn n(&self) -> usize {
        self.features.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn targets(&self) -> &[LabelDistribution] {
        &self.targets
    }

    pub fn label_names(&self) -> Option<&[String]> {
        self.label_names.as_deref()
    }

    pub fn example(&self, i: usize) -> (&FeatureVector, &LabelDistribution) {
        (&self.features[i], &self.targets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureVector, &LabelDistribution)> {
        self.features.iter().zip(self.targets.iter())
    }

    /// New dataset containing the given example indices, in order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = indices.iter().map(|&i| self.features[i].clone()).collect();
        let targets = indices.iter().map(|&i| self.targets[i].clone()).collect();
        Self::new(features, targets, self.label_names.clone())
    }
}

/// The uniform prediction contract: every trained model maps a feature
/// vector to a valid label distribution.
pub trait Predictor {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution>;

    /// Number of labels the model emits.
    fn label_count(&self) -> usize;

    /// Feature dimensionality the model expects.
    fn feature_count(&self) -> usize;

    /// Short algorithm name, e.g. `sa-bfgs`.
    fn algorithm(&self) -> &str;

    /// Training hyperparameters as (name, value) pairs, for report metadata.
    fn params(&self) -> Vec<(String, String)> {
        Vec::new()
    }
}

impl<P: Predictor + ?Sized> Predictor for Box<P> {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
        (**self).predict(x)
    }
    fn label_count(&self) -> usize {
        (**self).label_count()
    }
    fn feature_count(&self) -> usize {
        (**self).feature_count()
    }
    fn algorithm(&self) -> &str {
        (**self).algorithm()
    }
    fn params(&self) -> Vec<(String, String)> {
        (**self).params()
    }
}

/// Sum over examples and labels of `d * ln p`, the criterion maximized when
/// fitting by Kullback-Leibler divergence. Terms with `d = 0` contribute 0;
/// predicted probabilities are clamped below at [`LOG_CLAMP`].
///
/// On single-label (Kronecker) data this reduces to the log-likelihood
/// `sum_i ln p(y(x_i)|x_i)`; on uniform-over-set data it reduces to the
/// reciprocal-cardinality weighted likelihood.
pub fn kl_objective<P: Predictor + ?Sized>(dataset: &LdlDataset, predictor: &P) -> Result<f64> {
    check_dims(dataset, predictor)?;
    let mut total = 0.0;
    for (x, d) in dataset.iter() {
        let p = predictor.predict(x)?;
        for (&dj, &pj) in d.degrees().iter().zip(p.degrees()) {
            if dj > 0.0 {
                total += dj * pj.max(LOG_CLAMP).ln();
            }
        }
    }
    Ok(total)
}

pub(crate) fn check_dims<P: Predictor + ?Sized>(dataset: &LdlDataset, predictor: &P) -> Result<()> {
    if predictor.label_count() != dataset.c() || predictor.feature_count() != dataset.q() {
        return Err(LdlError::DimensionMismatch {
            context: format!(
                "predictor is {}x{} (labels x features), dataset is {}x{}",
                predictor.label_count(),
                predictor.feature_count(),
                dataset.c(),
                dataset.q()
            ),
        });
    }
    Ok(())
}

/// Per-feature affine transform to zero mean and unit variance, fitted on a
/// training set and applied to any vector of the same dimensionality.
///
/// Constant features keep scale 1 so the transform stays invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(dataset: &LdlDataset) -> Self {
        let q = dataset.q();
        let n = dataset.n() as f64;
        let mut means = vec![0.0; q];
        for x in dataset.features() {
            for (m, &v) in means.iter_mut().zip(x.values()) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = vec![0.0; q];
        for x in dataset.features() {
            for ((var, &m), &v) in vars.iter_mut().zip(&means).zip(x.values()) {
                *var += (v - m) * (v - m);
            }
        }
        let scales = vars
            .iter()
            .map(|&v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { means, scales }
    }

    pub fn from_parts(means: Vec<f64>, scales: Vec<f64>) -> Self {
        Self { means, scales }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn transform_vector(&self, x: &FeatureVector) -> Result<FeatureVector> {
        if x.len() != self.means.len() {
            return Err(LdlError::DimensionMismatch {
                context: format!(
                    "standardizer fitted on {} features, input has {}",
                    self.means.len(),
                    x.len()
                ),
            });
        }
        let values = x
            .values()
            .iter()
            .zip(&self.means)
            .zip(&self.scales)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect();
        FeatureVector::new(values)
    }

    pub fn transform_dataset(&self, dataset: &LdlDataset) -> Result<LdlDataset> {
        let features = dataset
            .features()
            .iter()
            .map(|x| self.transform_vector(x))
            .collect::<Result<Vec<_>>>()?;
        LdlDataset::new(
            features,
            dataset.targets().to_vec(),
            dataset.label_names().map(|n| n.to_vec()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_pair_is_valid() {
        let d = LabelDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(d.degrees(), &[0.5, 0.5]);
    }

    #[test]
    fn kronecker_input_is_valid() {
        let d = LabelDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(d.degrees(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn bad_sum_rejected() {
        match LabelDistribution::new(vec![0.7, 0.7]) {
            Err(LdlError::BadSum { sum }) => assert!((sum - 1.4).abs() < 1e-12),
            other => panic!("expected BadSum, got {other:?}"),
        }
    }

    #[test]
    fn negative_degree_rejected() {
        assert!(matches!(
            LabelDistribution::new(vec![1.1, -0.1]),
            Err(LdlError::NegativeDegree { index: 1, .. })
        ));
    }

    #[test]
    fn single_label_rejected() {
        assert!(matches!(
            LabelDistribution::new(vec![1.0]),
            Err(LdlError::TooShort { c: 1 })
        ));
    }

    #[test]
    fn near_unit_sum_renormalized_exactly() {
        let d = LabelDistribution::new(vec![0.3000001, 0.7]).unwrap();
        let sum: f64 = d.degrees().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_negative_noise_clamped() {
        let d = LabelDistribution::new(vec![1.0, -1e-13, 1e-13]).unwrap();
        assert!(d.degrees()[1] == 0.0);
    }

    #[test]
    fn from_single_label_examples() {
        assert_eq!(
            LabelDistribution::from_single_label(1, 4).unwrap().degrees(),
            &[0.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(
            LabelDistribution::from_single_label(0, 2).unwrap().degrees(),
            &[1.0, 0.0]
        );
        assert!(matches!(
            LabelDistribution::from_single_label(5, 3),
            Err(LdlError::IndexOutOfRange { index: 5, c: 3 })
        ));
    }

    #[test]
    fn from_label_set_examples() {
        assert_eq!(
            LabelDistribution::from_label_set(&[1, 3], 4).unwrap().degrees(),
            &[0.0, 0.5, 0.0, 0.5]
        );
        assert_eq!(
            LabelDistribution::from_label_set(&[0], 3).unwrap().degrees(),
            &[1.0, 0.0, 0.0]
        );
        let thirds = LabelDistribution::from_label_set(&[0, 1, 2], 3).unwrap();
        for &v in thirds.degrees() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(matches!(
            LabelDistribution::from_label_set(&[], 3),
            Err(LdlError::EmptySet)
        ));
        assert!(matches!(
            LabelDistribution::from_label_set(&[4], 3),
            Err(LdlError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn singleton_set_equals_single_label() {
        for c in 2..6 {
            for j in 0..c {
                assert_eq!(
                    LabelDistribution::from_single_label(j, c).unwrap(),
                    LabelDistribution::from_label_set(&[j], c).unwrap()
                );
            }
        }
    }

    #[test]
    fn non_finite_feature_rejected() {
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn ragged_dataset_rejected() {
        let features = vec![
            FeatureVector::new(vec![1.0, 2.0]).unwrap(),
            FeatureVector::new(vec![1.0]).unwrap(),
        ];
        let targets = vec![
            LabelDistribution::new(vec![0.5, 0.5]).unwrap(),
            LabelDistribution::new(vec![0.5, 0.5]).unwrap(),
        ];
        assert!(LdlDataset::new(features, targets, None).is_err());
    }

    /// Fixed-table predictor for objective tests.
    struct TablePredictor {
        rows: Vec<LabelDistribution>,
        q: usize,
    }

    impl Predictor for TablePredictor {
        fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
            // Row keyed by the first feature value.
            Ok(self.rows[x.values()[0] as usize].clone())
        }
        fn label_count(&self) -> usize {
            self.rows[0].len()
        }
        fn feature_count(&self) -> usize {
            self.q
        }
        fn algorithm(&self) -> &str {
            "table"
        }
    }

    fn indexed_dataset(targets: Vec<LabelDistribution>) -> LdlDataset {
        let features = (0..targets.len())
            .map(|i| FeatureVector::new(vec![i as f64]).unwrap())
            .collect();
        LdlDataset::new(features, targets, None).unwrap()
    }

    #[test]
    fn kl_objective_single_uniform_example() {
        let dataset = indexed_dataset(vec![LabelDistribution::new(vec![0.5, 0.5]).unwrap()]);
        let predictor = TablePredictor {
            rows: vec![LabelDistribution::new(vec![0.5, 0.5]).unwrap()],
            q: 1,
        };
        let got = kl_objective(&dataset, &predictor).unwrap();
        assert!((got - 0.5f64.ln()).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn kl_objective_matches_log_likelihood_on_kronecker_data() {
        let targets: Vec<_> = [0usize, 2, 1, 2]
            .iter()
            .map(|&j| LabelDistribution::from_single_label(j, 3).unwrap())
            .collect();
        let dataset = indexed_dataset(targets);
        let rows: Vec<_> = [
            vec![0.6, 0.3, 0.1],
            vec![0.2, 0.3, 0.5],
            vec![0.1, 0.8, 0.1],
            vec![0.25, 0.25, 0.5],
        ]
        .into_iter()
        .map(|v| LabelDistribution::new(v).unwrap())
        .collect();
        let predictor = TablePredictor { rows: rows.clone(), q: 1 };

        let got = kl_objective(&dataset, &predictor).unwrap();
        let expected: f64 = [(0usize, 0usize), (1, 2), (2, 1), (3, 2)]
            .iter()
            .map(|&(i, j)| rows[i].degrees()[j].ln())
            .sum();
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn kl_objective_matches_weighted_criterion_on_label_set_data() {
        let sets: Vec<Vec<usize>> = vec![vec![0, 1], vec![2], vec![0, 1, 2]];
        let targets: Vec<_> = sets
            .iter()
            .map(|s| LabelDistribution::from_label_set(s, 3).unwrap())
            .collect();
        let dataset = indexed_dataset(targets);
        let rows: Vec<_> = [
            vec![0.6, 0.3, 0.1],
            vec![0.2, 0.3, 0.5],
            vec![0.1, 0.8, 0.1],
        ]
        .into_iter()
        .map(|v| LabelDistribution::new(v).unwrap())
        .collect();
        let predictor = TablePredictor { rows: rows.clone(), q: 1 };

        let got = kl_objective(&dataset, &predictor).unwrap();
        let expected: f64 = sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                set.iter().map(|&j| rows[i].degrees()[j].ln()).sum::<f64>() / set.len() as f64
            })
            .sum();
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
    }

    #[test]
    fn kl_objective_exact_reproduction_gives_negative_entropy() {
        let rows: Vec<_> = [vec![0.4, 0.6], vec![0.7, 0.3]]
            .into_iter()
            .map(|v| LabelDistribution::new(v).unwrap())
            .collect();
        let dataset = indexed_dataset(rows.clone());
        let predictor = TablePredictor { rows: rows.clone(), q: 1 };
        let got = kl_objective(&dataset, &predictor).unwrap();
        let expected: f64 = rows
            .iter()
            .flat_map(|d| d.degrees().iter())
            .map(|&v| v * v.ln())
            .sum();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn kl_objective_dimension_mismatch() {
        let dataset = indexed_dataset(vec![LabelDistribution::new(vec![0.5, 0.5]).unwrap()]);
        let predictor = TablePredictor {
            rows: vec![LabelDistribution::new(vec![0.4, 0.3, 0.3]).unwrap()],
            q: 1,
        };
        assert!(matches!(
            kl_objective(&dataset, &predictor),
            Err(LdlError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standardizer_zero_mean_unit_variance() {
        let features = vec![
            FeatureVector::new(vec![1.0, 10.0]).unwrap(),
            FeatureVector::new(vec![3.0, 10.0]).unwrap(),
            FeatureVector::new(vec![5.0, 10.0]).unwrap(),
        ];
        let targets = vec![LabelDistribution::new(vec![0.5, 0.5]).unwrap(); 3];
        let dataset = LdlDataset::new(features, targets, None).unwrap();
        let std = Standardizer::fit(&dataset);
        let transformed = std.transform_dataset(&dataset).unwrap();

        let col0: Vec<f64> = transformed.features().iter().map(|x| x.values()[0]).collect();
        let mean: f64 = col0.iter().sum::<f64>() / 3.0;
        let var: f64 = col0.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
        // Constant feature passes through shifted but unscaled.
        assert_eq!(transformed.features()[0].values()[1], 0.0);
    }
}
