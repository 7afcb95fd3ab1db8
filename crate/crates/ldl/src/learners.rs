//! Standard learner set for the cross-validation harness: each of the five
//! algorithms wrapped as a [`CvLearner`] with its default hyperparameter
//! grid.

use crate::data::{LdlDataset, Predictor};
use crate::error::Result;
use crate::io::CvLearner;
use crate::maxent::{train_bfgs, train_iis, BfgsConfig, IisConfig};
use crate::neighbors::KnnModel;
use crate::neural::{train as train_bp, BpConfig};
use crate::transform::fit_pt_bayes;

/// Gaussian Bayes over the resampled single-label expansion. One candidate;
/// `lambda: None` selects automatic trace-scaled shrinkage.
pub struct PtBayesLearner {
    pub lambda: Option<f64>,
}

impl Default for PtBayesLearner {
    fn default() -> Self {
        Self { lambda: None }
    }
}

impl CvLearner for PtBayesLearner {
    fn name(&self) -> &str {
        "pt-bayes"
    }

    fn candidates(&self) -> Vec<String> {
        let lambda = match self.lambda {
            Some(v) => v.to_string(),
            None => "auto".to_string(),
        };
        vec![format!("lambda={lambda}")]
    }

    fn fit(&self, _candidate: usize, data: &LdlDataset, seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(fit_pt_bayes(data, self.lambda, seed)?))
    }
}

/// Distribution-averaging k-NN with the default neighbor grid {3,5,7,9,11}.
pub struct KnnLearner {
    pub ks: Vec<usize>,
}

impl Default for KnnLearner {
    fn default() -> Self {
        Self {
            ks: vec![3, 5, 7, 9, 11],
        }
    }
}

impl CvLearner for KnnLearner {
    fn name(&self) -> &str {
        "aa-knn"
    }

    fn candidates(&self) -> Vec<String> {
        self.ks.iter().map(|k| format!("k={k}")).collect()
    }

    fn fit(&self, candidate: usize, data: &LdlDataset, _seed: u64) -> Result<Box<dyn Predictor>> {
        let k = self.ks[candidate].min(data.n());
        Ok(Box::new(KnnModel::fit(data.clone(), k)?))
    }
}

/// Backpropagation network with a hidden-width grid (default {32, 64}).
pub struct BpLearner {
    pub hidden_options: Vec<usize>,
    pub base: BpConfig,
}

impl Default for BpLearner {
    fn default() -> Self {
        Self {
            hidden_options: vec![32, 64],
            base: BpConfig::default(),
        }
    }
}

impl CvLearner for BpLearner {
    fn name(&self) -> &str {
        "aa-bp"
    }

    fn candidates(&self) -> Vec<String> {
        self.hidden_options.iter().map(|h| format!("h={h}")).collect()
    }

    fn fit(&self, candidate: usize, data: &LdlDataset, seed: u64) -> Result<Box<dyn Predictor>> {
        let config = BpConfig {
            hidden_units: self.hidden_options[candidate],
            seed,
            ..self.base.clone()
        };
        let (net, _) = train_bp(data, &config)?;
        Ok(Box::new(net))
    }
}

/// Maximum-entropy model trained by improved iterative scaling. One
/// candidate (the convergence settings).
pub struct IisLearner {
    pub config: IisConfig,
}

impl Default for IisLearner {
    fn default() -> Self {
        Self {
            config: IisConfig::default(),
        }
    }
}

impl CvLearner for IisLearner {
    fn name(&self) -> &str {
        "sa-iis"
    }

    fn candidates(&self) -> Vec<String> {
        vec![format!("epsilon={}", self.config.epsilon)]
    }

    fn fit(&self, _candidate: usize, data: &LdlDataset, _seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(train_iis(data, &self.config)?.model))
    }
}

/// Maximum-entropy model trained by BFGS. One candidate.
pub struct BfgsLearner {
    pub config: BfgsConfig,
}

impl Default for BfgsLearner {
    fn default() -> Self {
        Self {
            config: BfgsConfig::default(),
        }
    }
}

impl CvLearner for BfgsLearner {
    fn name(&self) -> &str {
        "sa-bfgs"
    }

    fn candidates(&self) -> Vec<String> {
        vec![format!("epsilon={}", self.config.epsilon)]
    }

    fn fit(&self, _candidate: usize, data: &LdlDataset, _seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(train_bfgs(data, &self.config)?.model))
    }
}

/// All five algorithm names in report order.
pub const ALGORITHM_NAMES: [&str; 5] = ["pt-bayes", "aa-knn", "aa-bp", "sa-iis", "sa-bfgs"];

/// Default-configured learner for an algorithm name; `None` for unknown
/// names.
pub fn standard_learner(name: &str) -> Option<Box<dyn CvLearner>> {
    match name {
        "pt-bayes" => Some(Box::new(PtBayesLearner::default())),
        "aa-knn" => Some(Box::new(KnnLearner::default())),
        "aa-bp" => Some(Box::new(BpLearner::default())),
        "sa-iis" => Some(Box::new(IisLearner::default())),
        "sa-bfgs" => Some(Box::new(BfgsLearner::default())),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_all_names() {
        for name in ALGORITHM_NAMES {
            let learner = standard_learner(name).unwrap();
            assert_eq!(learner.name(), name);
            assert!(!learner.candidates().is_empty());
        }
        assert!(standard_learner("pt-svm").is_none());
    }

    #[test]
    fn default_grids_match_documentation() {
        assert_eq!(
            standard_learner("aa-knn").unwrap().candidates(),
            vec!["k=3", "k=5", "k=7", "k=9", "k=11"]
        );
        assert_eq!(
            standard_learner("aa-bp").unwrap().candidates(),
            vec!["h=32", "h=64"]
        );
    }
}
