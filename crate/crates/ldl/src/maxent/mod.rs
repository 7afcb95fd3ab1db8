//! Maximum-entropy conditional model and its two specialized trainers.
//!
//! The model is `p(y_j|x) ∝ exp(θ_j · g(x))` with feature map
//! `g(x) = (1, x_1, …, x_q)`. Training maximizes
//! `T(θ) = Σ_{i,j} d_ij θ_j·g(x_i) − Σ_i ln Σ_j exp(θ_j·g(x_i))`,
//! the Kullback-Leibler fit criterion up to an entropy constant. Two
//! optimizers are provided: improved iterative scaling ([`train_iis`]) and
//! quasi-Newton BFGS with a strong-Wolfe line search ([`train_bfgs`]).

mod bfgs;
mod iis;
pub mod wolfe;

pub use bfgs::{bfgs_update, line_search, train_bfgs, train_bfgs_observed, BfgsStep};
pub use iis::{iis_delta, iis_lower_bound, train_iis, train_iis_observed, IisStep};

use std::fmt::Write as _;

use ndarray::{Array1, Array2, ArrayView1};

use crate::data::{FeatureVector, LabelDistribution, LdlDataset, Predictor};
use crate::error::{LdlError, Result};

/// Conditional exponential model over `c` labels with a parameter row per
/// label: column 0 is the bias weight, columns `1..=q` weight the raw
/// features.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntModel {
    theta: Array2<f64>,
    algorithm: String,
    meta: Vec<(String, String)>,
}

impl MaxEntModel {
    /// Build a model from a `c × (q+1)` parameter matrix.
    pub fn new(theta: Array2<f64>) -> Result<Self> {
        Self::with_algorithm(theta, "maxent")
    }

    pub fn with_algorithm(theta: Array2<f64>, algorithm: &str) -> Result<Self> {
        if theta.nrows() < 2 || theta.ncols() < 1 {
            return Err(LdlError::DimensionMismatch {
                context: format!("theta is {}x{}", theta.nrows(), theta.ncols()),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(LdlError::NonFiniteInput {
                context: "theta contains a non-finite entry".to_string(),
            });
        }
        Ok(Self {
            theta,
            algorithm: algorithm.to_string(),
            meta: Vec::new(),
        })
    }

    /// Zero-parameter model (uniform predictions) for `c` labels and `q`
    /// features.
    pub fn zeros(c: usize, q: usize) -> Result<Self> {
        Self::new(Array2::zeros((c, q + 1)))
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn set_meta(&mut self, meta: Vec<(String, String)>) {
        self.meta = meta;
    }

    /// Label count `c`.
    pub fn c(&self) -> usize {
        self.theta.nrows()
    }

    /// Feature count `q` (bias excluded).
    pub fn q(&self) -> usize {
        self.theta.ncols() - 1
    }

    fn logits(&self, x: &[f64]) -> Array1<f64> {
        let mut z = Array1::zeros(self.c());
        for (j, row) in self.theta.rows().into_iter().enumerate() {
            z[j] = dot_feature_map(row, x);
        }
        z
    }
}

/// `θ_row · g(x)` with `g(x) = (1, x…)`, without materializing `g`.
fn dot_feature_map(row: ArrayView1<'_, f64>, x: &[f64]) -> f64 {
    let mut acc = row[0];
    for (k, &v) in x.iter().enumerate() {
        acc += row[k + 1] * v;
    }
    acc
}

/// Softmax with max-subtraction; `logits` is overwritten with probabilities.
pub(crate) fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        sum += *z;
    }
    for z in logits.iter_mut() {
        *z /= sum;
    }
}

/// `ln Σ exp(z)` with max-subtraction.
pub(crate) fn log_sum_exp(z: ArrayView1<'_, f64>) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

impl Predictor for MaxEntModel {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
        if x.len() != self.q() {
            return Err(LdlError::DimensionMismatch {
                context: format!("model expects {} features, input has {}", self.q(), x.len()),
            });
        }
        let mut z = self.logits(x.values());
        softmax_in_place(z.as_slice_mut().expect("contiguous"));
        LabelDistribution::new(z.to_vec())
    }

    fn label_count(&self) -> usize {
        self.c()
    }

    fn feature_count(&self) -> usize {
        self.q()
    }

    fn algorithm(&self) -> &str {
        &self.algorithm
    }

    fn params(&self) -> Vec<(String, String)> {
        self.meta.clone()
    }
}

/// Target function `T(θ)`: the linear term minus the log-partition sum,
/// evaluated with stable log-sum-exp.
pub fn objective_t(model: &MaxEntModel, dataset: &LdlDataset) -> Result<f64> {
    let problem = Problem::from_dataset(dataset, 0.0)?;
    problem.check_theta(model.theta())?;
    Ok(problem.t_value(model.theta()))
}

/// Gradient of `T'(θ) = −T(θ)`:
/// `∂T'/∂θ_{j,k} = Σ_i p(y_j|x_i;θ) g_k(x_i) − Σ_i d_ij g_k(x_i)`.
pub fn gradient_t_prime(model: &MaxEntModel, dataset: &LdlDataset) -> Result<Array2<f64>> {
    let problem = Problem::from_dataset(dataset, 0.0)?;
    problem.check_theta(model.theta())?;
    Ok(problem.eval(model.theta()).1)
}

/// Convergence outcome of a trainer run. Hitting the iteration cap is a
/// warning, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceStatus {
    Converged,
    MaxIterations,
    /// The objective can no longer be decreased at floating-point
    /// resolution, with the gradient norm still above `epsilon`.
    Stalled,
}

/// One optimizer iteration: objective value after the step, gradient norm,
/// accepted step length (1 for scaling updates), and elapsed wall time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step_length: f64,
    pub millis: f64,
}

/// CSV export of a trace: `iteration,T,grad_norm,alpha,millis`.
pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from("iteration,T,grad_norm,alpha,millis\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{:.3}",
            r.iteration, r.objective, r.grad_norm, r.step_length, r.millis
        );
    }
    out
}

/// Trained model plus per-iteration trace.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: MaxEntModel,
    pub trace: Vec<TraceRecord>,
    pub status: ConvergenceStatus,
}

/// Improved-iterative-scaling configuration. `epsilon` bounds the objective
/// change at which the outer loop stops.
#[derive(Debug, Clone)]
pub struct IisConfig {
    pub epsilon: f64,
    pub max_outer_iters: usize,
    pub newton_iters: usize,
    pub newton_tol: f64,
    /// Scalar updates are clamped to `[-delta_max, delta_max]`.
    pub delta_max: f64,
    /// Optional ridge penalty coefficient on `θ` (0 disables).
    pub l2: f64,
}

impl Default for IisConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_outer_iters: 500,
            newton_iters: 20,
            newton_tol: 1e-10,
            delta_max: 30.0,
            l2: 0.0,
        }
    }
}

impl IisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0
            || self.max_outer_iters == 0
            || self.newton_iters == 0
            || self.newton_tol <= 0.0
            || self.delta_max <= 0.0
            || self.l2 < 0.0
        {
            return Err(LdlError::NonFiniteInput {
                context: "IIS configuration values must be positive".to_string(),
            });
        }
        Ok(())
    }
}

/// BFGS configuration. `epsilon` bounds the gradient norm at which the
/// outer loop stops; `c1 < c2` are the strong Wolfe constants.
#[derive(Debug, Clone)]
pub struct BfgsConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search_steps: usize,
    /// Optional ridge penalty coefficient on `θ` (0 disables).
    pub l2: f64,
}

impl Default for BfgsConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_iters: 300,
            c1: 1e-4,
            c2: 0.9,
            max_line_search_steps: 50,
            l2: 0.0,
        }
    }
}

impl BfgsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return Err(LdlError::NonFiniteInput {
                context: format!("Wolfe constants need 0 < c1 < c2 < 1, got {} / {}", self.c1, self.c2),
            });
        }
        if self.epsilon <= 0.0 || self.max_iters == 0 || self.max_line_search_steps == 0 || self.l2 < 0.0 {
            return Err(LdlError::NonFiniteInput {
                context: "BFGS configuration values must be positive".to_string(),
            });
        }
        Ok(())
    }
}

/// Dense training-problem view: design matrix with a leading bias column and
/// the target degree matrix.
pub(crate) struct Problem {
    /// `n × (q+1)`, column 0 all ones.
    pub g: Array2<f64>,
    /// `n × c`.
    pub d: Array2<f64>,
    pub l2: f64,
}

impl Problem {
    pub fn from_dataset(dataset: &LdlDataset, l2: f64) -> Result<Self> {
        let n = dataset.n();
        let q = dataset.q();
        let c = dataset.c();
        let mut g = Array2::zeros((n, q + 1));
        let mut d = Array2::zeros((n, c));
        for (i, (x, dist)) in dataset.iter().enumerate() {
            g[(i, 0)] = 1.0;
            for (k, &v) in x.values().iter().enumerate() {
                g[(i, k + 1)] = v;
            }
            for (j, &v) in dist.degrees().iter().enumerate() {
                d[(i, j)] = v;
            }
        }
        Ok(Self { g, d, l2 })
    }

    pub fn check_theta(&self, theta: &Array2<f64>) -> Result<()> {
        if theta.nrows() != self.d.ncols() || theta.ncols() != self.g.ncols() {
            return Err(LdlError::DimensionMismatch {
                context: format!(
                    "theta is {}x{}, problem needs {}x{}",
                    theta.nrows(),
                    theta.ncols(),
                    self.d.ncols(),
                    self.g.ncols()
                ),
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// Per-example conditionals `p(y_j|x_i;θ)` as an `n × c` matrix.
    pub fn probs(&self, theta: &Array2<f64>) -> Array2<f64> {
        let mut z = self.g.dot(&theta.t());
        for mut row in z.rows_mut() {
            softmax_in_place(row.as_slice_mut().expect("contiguous"));
        }
        z
    }

    /// `T(θ)` (penalty excluded).
    pub fn t_value(&self, theta: &Array2<f64>) -> f64 {
        let z = self.g.dot(&theta.t());
        let mut t = 0.0;
        for (zrow, drow) in z.rows().into_iter().zip(self.d.rows()) {
            for (&zj, &dj) in zrow.iter().zip(drow) {
                if dj > 0.0 {
                    t += dj * zj;
                }
            }
            t -= log_sum_exp(zrow);
        }
        t
    }

    /// Minimization objective `T'(θ) = −T(θ) + l2·‖θ‖²` and its gradient.
    pub fn eval(&self, theta: &Array2<f64>) -> (f64, Array2<f64>) {
        let z = self.g.dot(&theta.t());
        let mut t = 0.0;
        let mut p = z.clone();
        for (i, zrow) in z.rows().into_iter().enumerate() {
            let lse = log_sum_exp(zrow);
            t -= lse;
            for (j, &zj) in zrow.iter().enumerate() {
                let dj = self.d[(i, j)];
                if dj > 0.0 {
                    t += dj * zj;
                }
                p[(i, j)] = (zj - lse).exp();
            }
        }
        // ∇T' = (P − D)ᵀ G  (+ ridge term).
        let resid = &p - &self.d;
        let mut grad = resid.t().dot(&self.g);
        let mut f = -t;
        if self.l2 > 0.0 {
            let norm_sq: f64 = theta.iter().map(|v| v * v).sum();
            f += self.l2 * norm_sq;
            grad.zip_mut_with(theta, |gv, &tv| *gv += 2.0 * self.l2 * tv);
        }
        (f, grad)
    }

    /// Euclidean norm of `∇T'`.
    pub fn grad_norm(&self, theta: &Array2<f64>) -> f64 {
        let (_, grad) = self.eval(theta);
        grad.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_dataset(seed: u64, n: usize, q: usize, c: usize) -> LdlDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = (0..n)
            .map(|_| {
                FeatureVector::new((0..q).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
            })
            .collect();
        let targets = (0..n)
            .map(|_| {
                let raw: Vec<f64> = (0..c).map(|_| -f64::ln(rng.gen_range(1e-6..1.0))).collect();
                let sum: f64 = raw.iter().sum();
                LabelDistribution::new(raw.into_iter().map(|v| v / sum).collect()).unwrap()
            })
            .collect();
        LdlDataset::new(features, targets, None).unwrap()
    }

    fn random_theta(seed: u64, c: usize, q: usize) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((c, q + 1), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn zero_theta_predicts_uniform() {
        let model = MaxEntModel::zeros(4, 3).unwrap();
        let x = FeatureVector::new(vec![0.3, -0.7, 2.0]).unwrap();
        let p = model.predict(&x).unwrap();
        for &v in p.degrees() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_shift_invariance() {
        let theta = random_theta(3, 3, 2);
        let mut shifted = theta.clone();
        for mut row in shifted.rows_mut() {
            row[0] += 5.0;
            row[1] -= 2.5;
            row[2] += 0.25;
        }
        let a = MaxEntModel::new(theta).unwrap();
        let b = MaxEntModel::new(shifted).unwrap();
        let x = FeatureVector::new(vec![0.4, -1.2]).unwrap();
        let pa = a.predict(&x).unwrap();
        let pb = b.predict(&x).unwrap();
        for (&u, &v) in pa.degrees().iter().zip(pb.degrees()) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_logit_rows_predict_half() {
        // Rows differ only in the feature weight; at x = 0 the bias ties.
        let theta = ndarray::array![[0.7, 0.0], [0.7, 1.0]];
        let model = MaxEntModel::new(theta).unwrap();
        let p = model
            .predict(&FeatureVector::new(vec![0.0]).unwrap())
            .unwrap();
        assert!((p.degrees()[0] - 0.5).abs() < 1e-15);
        assert!((p.degrees()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn prediction_sums_to_one_under_extreme_logits() {
        let theta = ndarray::array![[500.0, 300.0], [-400.0, 200.0], [0.0, -350.0]];
        let model = MaxEntModel::new(theta).unwrap();
        let p = model
            .predict(&FeatureVector::new(vec![1.0]).unwrap())
            .unwrap();
        let sum: f64 = p.degrees().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn objective_at_zero_theta_is_minus_n_ln_c() {
        let dataset = small_dataset(11, 17, 3, 4);
        let model = MaxEntModel::zeros(4, 3).unwrap();
        let t = objective_t(&model, &dataset).unwrap();
        let expected = -(dataset.n() as f64) * 4.0f64.ln();
        assert!((t - expected).abs() < 1e-10, "got {t}, want {expected}");
    }

    #[test]
    fn objective_equals_kl_objective_up_to_entropy_constant() {
        let dataset = small_dataset(7, 13, 2, 3);
        let model = MaxEntModel::new(random_theta(8, 3, 2)).unwrap();
        let t = objective_t(&model, &dataset).unwrap();
        let ll = crate::data::kl_objective(&dataset, &model).unwrap();
        assert!((t - ll).abs() < 1e-9, "T = {t}, sum d ln p = {ll}");
    }

    #[test]
    fn gradient_zero_when_model_matches_empirical_conditionals() {
        // One repeated feature vector: the empirical conditional is the mean
        // target, which the uniform-logit model reproduces exactly when the
        // targets are uniform.
        let features = vec![FeatureVector::new(vec![0.5]).unwrap(); 4];
        let targets = vec![LabelDistribution::new(vec![0.5, 0.5]).unwrap(); 4];
        let dataset = LdlDataset::new(features, targets, None).unwrap();
        let model = MaxEntModel::zeros(2, 1).unwrap();
        let grad = gradient_t_prime(&model, &dataset).unwrap();
        for &v in grad.iter() {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_hand_value_single_kronecker_example() {
        // One example, bias-only logits (x = empty not allowed; use x = 0 so
        // the feature column is inert), D = [1, 0].
        let features = vec![FeatureVector::new(vec![0.0]).unwrap()];
        let targets = vec![LabelDistribution::new(vec![1.0, 0.0]).unwrap()];
        let dataset = LdlDataset::new(features, targets, None).unwrap();
        let model = MaxEntModel::zeros(2, 1).unwrap();
        let grad = gradient_t_prime(&model, &dataset).unwrap();
        // Bias column: p − d = (0.5 − 1, 0.5 − 0).
        assert!((grad[(0, 0)] + 0.5).abs() < 1e-15);
        assert!((grad[(1, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(grad[(0, 1)], 0.0);
        assert_eq!(grad[(1, 1)], 0.0);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let h = 1e-5;
        for draw in 0..10u64 {
            let dataset = small_dataset(100 + draw, 12, 3, 3);
            let theta = random_theta(200 + draw, 3, 3);
            let problem = Problem::from_dataset(&dataset, 0.0).unwrap();
            let (_, analytic) = problem.eval(&theta);
            for j in 0..3 {
                for k in 0..4 {
                    let mut plus = theta.clone();
                    plus[(j, k)] += h;
                    let mut minus = theta.clone();
                    minus[(j, k)] -= h;
                    // T' = −T at l2 = 0.
                    let fd = -(problem.t_value(&plus) - problem.t_value(&minus)) / (2.0 * h);
                    let a = analytic[(j, k)];
                    let err = (fd - a).abs() / f64::max(1.0, a.abs());
                    assert!(err < 1e-6, "draw {draw} ({j},{k}): fd {fd} vs {a}");
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_detected() {
        let dataset = small_dataset(1, 5, 2, 3);
        let model = MaxEntModel::zeros(3, 4).unwrap();
        assert!(matches!(
            objective_t(&model, &dataset),
            Err(LdlError::DimensionMismatch { .. })
        ));
        let x = FeatureVector::new(vec![1.0]).unwrap();
        assert!(model.predict(&x).is_err());
    }

    #[test]
    fn non_finite_theta_rejected() {
        let theta = ndarray::array![[f64::NAN, 0.0], [0.0, 0.0]];
        assert!(matches!(
            MaxEntModel::new(theta),
            Err(LdlError::NonFiniteInput { .. })
        ));
    }

    #[test]
    fn ridge_term_enters_objective_and_gradient() {
        let dataset = small_dataset(42, 9, 2, 3);
        let theta = random_theta(43, 3, 2);
        let plain = Problem::from_dataset(&dataset, 0.0).unwrap();
        let ridged = Problem::from_dataset(&dataset, 0.5).unwrap();
        let (f0, g0) = plain.eval(&theta);
        let (f1, g1) = ridged.eval(&theta);
        let norm_sq: f64 = theta.iter().map(|v| v * v).sum();
        assert!((f1 - (f0 + 0.5 * norm_sq)).abs() < 1e-10);
        for (j, k) in [(0usize, 0usize), (1, 2), (2, 1)] {
            assert!((g1[(j, k)] - (g0[(j, k)] + theta[(j, k)])).abs() < 1e-10);
        }
    }
}
