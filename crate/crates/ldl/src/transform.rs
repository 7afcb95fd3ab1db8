//! Problem transformation: expand each example into weighted single-label
//! copies, resample into a standard single-label training set, and fit any
//! classifier that can report class posteriors. The bundled learner is a
//! full-covariance Gaussian Bayes classifier; others plug in through
//! [`SingleLabelLearner`].

use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureVector, LabelDistribution, LdlDataset, Predictor};
use crate::error::{LdlError, Result};
use crate::maxent::softmax_in_place;

/// One single-label copy of a source example, weighted by the description
/// degree of its label.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedExample {
    pub features: FeatureVector,
    pub label: usize,
    pub weight: f64,
}

/// Expand every `(x, D)` pair into `c` weighted single-label examples, one
/// per label, the weight copying the description degree. The output has
/// exactly `n·c` entries and total weight `n`.
pub fn expand(dataset: &LdlDataset) -> Vec<WeightedExample> {
    let mut out = Vec::with_capacity(dataset.n() * dataset.c());
    for (x, d) in dataset.iter() {
        for (label, &weight) in d.degrees().iter().enumerate() {
            out.push(WeightedExample {
                features: x.clone(),
                label,
                weight,
            });
        }
    }
    out
}

/// A plain single-label training set produced by resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLabelDataset {
    pub features: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    /// Number of classes.
    pub c: usize,
}

impl SingleLabelDataset {
    pub fn n(&self) -> usize {
        self.features.len()
    }

    pub fn q(&self) -> usize {
        self.features.first().map_or(0, |x| x.len())
    }
}

/// How resampling allocates the target counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMode {
    /// Seeded multinomial draws proportional to weight.
    Multinomial,
    /// Deterministic quota allocation by largest remainder; variance-free.
    LargestRemainder,
}

/// Draw `target_size` single-label examples with probability proportional to
/// weight. Zero-weight entries are never drawn. The class count is inferred
/// from the largest label present.
pub fn resample(
    weighted: &[WeightedExample],
    target_size: usize,
    seed: u64,
) -> Result<SingleLabelDataset> {
    resample_with(weighted, target_size, seed, ResampleMode::Multinomial)
}

pub fn resample_with(
    weighted: &[WeightedExample],
    target_size: usize,
    seed: u64,
    mode: ResampleMode,
) -> Result<SingleLabelDataset> {
    let total: f64 = weighted.iter().map(|w| w.weight).sum();
    if total <= 0.0 {
        return Err(LdlError::ZeroTotalWeight);
    }
    let c = weighted.iter().map(|w| w.label).max().unwrap_or(0) + 1;
    let indices = match mode {
        ResampleMode::Multinomial => {
            let mut cdf = Vec::with_capacity(weighted.len());
            let mut acc = 0.0;
            for w in weighted {
                acc += w.weight;
                cdf.push(acc);
            }
            let last_positive = weighted
                .iter()
                .rposition(|w| w.weight > 0.0)
                .expect("total weight positive");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..target_size)
                .map(|_| {
                    let r = rng.gen::<f64>() * total;
                    let idx = cdf.partition_point(|&v| v <= r);
                    idx.min(last_positive)
                })
                .collect::<Vec<_>>()
        }
        ResampleMode::LargestRemainder => {
            let mut counts: Vec<usize> = Vec::with_capacity(weighted.len());
            let mut fractions: Vec<(f64, usize)> = Vec::with_capacity(weighted.len());
            let mut assigned = 0usize;
            for (i, w) in weighted.iter().enumerate() {
                let quota = w.weight / total * target_size as f64;
                let base = quota.floor() as usize;
                counts.push(base);
                assigned += base;
                fractions.push((quota - base as f64, i));
            }
            fractions.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for &(fraction, i) in fractions.iter().take(target_size.saturating_sub(assigned)) {
                // A zero-weight entry has fraction 0; only reachable when the
                // remainder exceeds the number of fractional entries, which
                // cannot happen.
                debug_assert!(fraction > 0.0 || weighted[i].weight > 0.0);
                counts[i] += 1;
            }
            let mut indices = Vec::with_capacity(target_size);
            for (i, &count) in counts.iter().enumerate() {
                indices.extend(std::iter::repeat(i).take(count));
            }
            indices
        }
    };
    Ok(SingleLabelDataset {
        features: indices.iter().map(|&i| weighted[i].features.clone()).collect(),
        labels: indices.iter().map(|&i| weighted[i].label).collect(),
        c,
    })
}

/// A classifier able to report a posterior probability per class.
pub trait PosteriorClassifier {
    /// Posteriors over all `c` classes; nonnegative, summing to 1.
    fn class_posteriors(&self, x: &FeatureVector) -> Result<Vec<f64>>;
}

/// A single-label learner usable behind the transformation pipeline.
pub trait SingleLabelLearner {
    type Model: PosteriorClassifier;
    fn name(&self) -> &'static str;
    fn fit(&self, data: &SingleLabelDataset) -> Result<Self::Model>;
}

/// A fitted transformation-pipeline model: class posteriors reinterpreted as
/// description degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct PtModel<M> {
    inner: M,
    name: &'static str,
    q: usize,
    c: usize,
    seed: u64,
}

impl<M> PtModel<M> {
    pub fn inner(&self) -> &M {
        &self.inner
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl<M: PosteriorClassifier> Predictor for PtModel<M> {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
        if x.len() != self.q {
            return Err(LdlError::DimensionMismatch {
                context: format!("model expects {} features, input has {}", self.q, x.len()),
            });
        }
        LabelDistribution::new(self.inner.class_posteriors(x)?)
    }

    fn label_count(&self) -> usize {
        self.c
    }

    fn feature_count(&self) -> usize {
        self.q
    }

    fn algorithm(&self) -> &str {
        self.name
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![("seed".to_string(), self.seed.to_string())]
    }
}

/// Expand, resample to `c·n` examples, and fit `learner` on the result.
///
/// Errors with [`LdlError::EmptyClass`] when a label carrying positive
/// weight in the expansion ends up absent from the resample; callers may
/// retry with a larger target size. Labels with zero total weight are
/// simply never predicted.
pub fn fit_problem_transform<L: SingleLabelLearner>(
    dataset: &LdlDataset,
    learner: &L,
    seed: u64,
    mode: ResampleMode,
) -> Result<PtModel<L::Model>> {
    let weighted = expand(dataset);
    let target_size = dataset.n() * dataset.c();
    let resampled = resample_with(&weighted, target_size, seed, mode)?;

    let mut weight_per_class = vec![0.0f64; dataset.c()];
    for w in &weighted {
        weight_per_class[w.label] += w.weight;
    }
    let mut present = vec![false; dataset.c()];
    for &label in &resampled.labels {
        present[label] = true;
    }
    for (label, (&weight, &seen)) in weight_per_class.iter().zip(&present).enumerate() {
        if weight > 0.0 && !seen {
            return Err(LdlError::EmptyClass { label });
        }
    }

    let inner = learner.fit(&resampled)?;
    Ok(PtModel {
        inner,
        name: learner.name(),
        q: dataset.q(),
        c: dataset.c(),
        seed,
    })
}

/// Per-class Gaussian with full covariance, priors from class frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClassModel {
    priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    /// Regularized covariance per class; identity placeholder for classes
    /// with prior 0.
    covariances: Vec<Array2<f64>>,
    /// Cached Cholesky factors of the covariances.
    chol: Vec<Array2<f64>>,
}

impl GaussianClassModel {
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn covariances(&self) -> &[Array2<f64>] {
        &self.covariances
    }

    pub fn q(&self) -> usize {
        self.means.first().map_or(0, |m| m.len())
    }

    /// Rebuild from persisted parts, recomputing the Cholesky factors.
    pub fn from_parts(
        priors: Vec<f64>,
        means: Vec<Vec<f64>>,
        covariances: Vec<Array2<f64>>,
    ) -> Result<Self> {
        let chol = covariances
            .iter()
            .enumerate()
            .map(|(label, cov)| cholesky(cov).ok_or(LdlError::NotPositiveDefinite { label }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            priors,
            means,
            covariances,
            chol,
        })
    }

    fn log_density(&self, class: usize, x: &[f64]) -> f64 {
        let q = x.len();
        let diff: Vec<f64> = x
            .iter()
            .zip(&self.means[class])
            .map(|(&a, &b)| a - b)
            .collect();
        let l = &self.chol[class];
        let y = forward_solve(l, &diff);
        let quad: f64 = y.iter().map(|v| v * v).sum();
        let log_det: f64 = (0..q).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
        -0.5 * (quad + log_det + q as f64 * (2.0 * std::f64::consts::PI).ln())
    }
}

impl PosteriorClassifier for GaussianClassModel {
    fn class_posteriors(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        if x.len() != self.q() {
            return Err(LdlError::DimensionMismatch {
                context: format!("model expects {} features, input has {}", self.q(), x.len()),
            });
        }
        let mut log_post: Vec<f64> = self
            .priors
            .iter()
            .enumerate()
            .map(|(j, &prior)| {
                if prior > 0.0 {
                    prior.ln() + self.log_density(j, x.values())
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        softmax_in_place(&mut log_post);
        Ok(log_post)
    }
}

/// Covariance regularization policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shrinkage {
    /// `1e-3·trace/q` per class, raised to `1e-1·trace/q` for classes with
    /// fewer than `q+1` samples.
    Auto,
    /// Fixed ridge added to every class covariance (0 disables; fitting then
    /// fails on singular sample covariances).
    Fixed(f64),
}

/// Gaussian Bayes learner for the transformation pipeline.
#[derive(Debug, Clone, Copy)]
pub struct GaussianLearner {
    pub shrinkage: Shrinkage,
}

impl Default for GaussianLearner {
    fn default() -> Self {
        Self {
            shrinkage: Shrinkage::Auto,
        }
    }
}

impl SingleLabelLearner for GaussianLearner {
    type Model = GaussianClassModel;

    fn name(&self) -> &'static str {
        "pt-bayes"
    }

    fn fit(&self, data: &SingleLabelDataset) -> Result<GaussianClassModel> {
        let q = data.q();
        let c = data.c;
        let n = data.n();
        let mut counts = vec![0usize; c];
        for &label in &data.labels {
            counts[label] += 1;
        }

        let mut priors = vec![0.0; c];
        let mut means = vec![vec![0.0; q]; c];
        let mut covariances = Vec::with_capacity(c);
        let mut chol = Vec::with_capacity(c);
        for class in 0..c {
            let m = counts[class];
            priors[class] = m as f64 / n as f64;
            if m == 0 {
                covariances.push(Array2::eye(q));
                chol.push(Array2::eye(q));
                continue;
            }
            for (x, &label) in data.features.iter().zip(&data.labels) {
                if label == class {
                    for (acc, &v) in means[class].iter_mut().zip(x.values()) {
                        *acc += v;
                    }
                }
            }
            for v in &mut means[class] {
                *v /= m as f64;
            }
            let mut cov = Array2::<f64>::zeros((q, q));
            for (x, &label) in data.features.iter().zip(&data.labels) {
                if label == class {
                    for i in 0..q {
                        let di = x.values()[i] - means[class][i];
                        for j in 0..q {
                            let dj = x.values()[j] - means[class][j];
                            cov[(i, j)] += di * dj;
                        }
                    }
                }
            }
            cov.mapv_inplace(|v| v / m as f64);
            let trace: f64 = (0..q).map(|i| cov[(i, i)]).sum();
            let lambda = match self.shrinkage {
                Shrinkage::Fixed(v) => v,
                Shrinkage::Auto => {
                    let reg = if m < q + 1 { 1e-1 } else { 1e-3 };
                    let lam = reg * trace / q as f64;
                    if lam > 0.0 {
                        lam
                    } else {
                        1e-9
                    }
                }
            };
            for i in 0..q {
                cov[(i, i)] += lambda;
            }
            let factor = cholesky(&cov).ok_or(LdlError::NotPositiveDefinite { label: class })?;
            covariances.push(cov);
            chol.push(factor);
        }
        Ok(GaussianClassModel {
            priors,
            means,
            covariances,
            chol,
        })
    }
}

/// Expand, resample to `c·n` examples (seeded multinomial), and fit the
/// Gaussian Bayes classifier. `lambda` of `None` selects trace-scaled
/// automatic shrinkage.
pub fn fit_pt_bayes(
    dataset: &LdlDataset,
    lambda: Option<f64>,
    seed: u64,
) -> Result<PtModel<GaussianClassModel>> {
    fit_pt_bayes_with(dataset, lambda, seed, ResampleMode::Multinomial)
}

pub fn fit_pt_bayes_with(
    dataset: &LdlDataset,
    lambda: Option<f64>,
    seed: u64,
    mode: ResampleMode,
) -> Result<PtModel<GaussianClassModel>> {
    let learner = GaussianLearner {
        shrinkage: match lambda {
            Some(v) => Shrinkage::Fixed(v),
            None => Shrinkage::Auto,
        },
    };
    fit_problem_transform(dataset, &learner, seed, mode)
}

/// Posterior label distribution of a fitted Gaussian pipeline model.
pub fn predict_pt_bayes(
    model: &PtModel<GaussianClassModel>,
    x: &FeatureVector,
) -> Result<LabelDistribution> {
    model.predict(x)
}

/// Rebuild a pipeline model around persisted Gaussian parts.
pub fn pt_bayes_from_parts(
    gaussian: GaussianClassModel,
    q: usize,
    c: usize,
    seed: u64,
) -> PtModel<GaussianClassModel> {
    PtModel {
        inner: gaussian,
        name: "pt-bayes",
        q,
        c,
        seed,
    }
}

/// Lower-triangular Cholesky factor; `None` when the matrix is not positive
/// definite.
fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[(i, j)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Solve `L y = b` for lower-triangular `L`.
fn forward_solve(l: &Array2<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[(i, k)] * y[k];
        }
        y[i] = sum / l[(i, i)];
    }
    y
}
