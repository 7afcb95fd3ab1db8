//! Three-layer backpropagation network adapted to label distributions:
//! sigmoid hidden layer, softmax output layer, trained by per-example
//! gradient descent on the sum-squared error against the target
//! distributions.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureVector, LabelDistribution, LdlDataset, Predictor};
use crate::error::{LdlError, Result};
use crate::maxent::softmax_in_place;

/// Training hyperparameters. The paper-era defaults are a single hidden
/// layer of 64 sigmoid units updated example-by-example at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct BpConfig {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Initial weights are uniform on `(-init_scale, init_scale)`.
    pub init_scale: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            hidden_units: 64,
            learning_rate: 0.01,
            epochs: 500,
            seed: 0,
            init_scale: 0.1,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 || self.learning_rate <= 0.0 || self.epochs == 0 || self.init_scale <= 0.0 {
            return Err(LdlError::NonFiniteInput {
                context: "BP configuration values must be positive".to_string(),
            });
        }
        Ok(())
    }
}

/// Feedforward weights: `hidden` maps the bias-extended input to the hidden
/// layer (`h × (q+1)`), `output` maps the bias-extended hidden activations
/// to the label logits (`c × (h+1)`). Column 0 of each matrix is the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct BpNetwork {
    hidden: Array2<f64>,
    output: Array2<f64>,
    config: BpConfig,
}

impl BpNetwork {
    pub fn from_weights(hidden: Array2<f64>, output: Array2<f64>, config: BpConfig) -> Result<Self> {
        if output.ncols() != hidden.nrows() + 1 {
            return Err(LdlError::DimensionMismatch {
                context: format!(
                    "output layer expects {} hidden units (+bias), hidden layer has {}",
                    output.ncols() - 1,
                    hidden.nrows()
                ),
            });
        }
        if hidden.iter().chain(output.iter()).any(|v| !v.is_finite()) {
            return Err(LdlError::NonFiniteInput {
                context: "network weights contain a non-finite entry".to_string(),
            });
        }
        Ok(Self { hidden, output, config })
    }

    pub fn hidden_weights(&self) -> &Array2<f64> {
        &self.hidden
    }

    pub fn output_weights(&self) -> &Array2<f64> {
        &self.output
    }

    pub fn config(&self) -> &BpConfig {
        &self.config
    }

    fn q(&self) -> usize {
        self.hidden.ncols() - 1
    }

    fn h(&self) -> usize {
        self.hidden.nrows()
    }

    fn c(&self) -> usize {
        self.output.nrows()
    }

    /// Hidden activations and output distribution for one input.
    fn activations(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = self.h();
        let mut hidden_act = vec![0.0; h];
        for (m, act) in hidden_act.iter_mut().enumerate() {
            let mut net = self.hidden[(m, 0)];
            for (k, &v) in x.iter().enumerate() {
                net += self.hidden[(m, k + 1)] * v;
            }
            *act = sigmoid(net);
        }
        let c = self.c();
        let mut logits = vec![0.0; c];
        for (j, logit) in logits.iter_mut().enumerate() {
            let mut net = self.output[(j, 0)];
            for (m, &a) in hidden_act.iter().enumerate() {
                net += self.output[(j, m + 1)] * a;
            }
            *logit = net;
        }
        softmax_in_place(&mut logits);
        (hidden_act, logits)
    }

    /// Sum-squared error `½ Σ_i Σ_j (z_j(x_i) − d_ij)²` over a dataset.
    pub fn sse(&self, dataset: &LdlDataset) -> Result<f64> {
        crate::data::check_dims(dataset, self)?;
        let mut total = 0.0;
        for (x, d) in dataset.iter() {
            let (_, z) = self.activations(x.values());
            total += z
                .iter()
                .zip(d.degrees())
                .map(|(&zj, &dj)| 0.5 * (zj - dj) * (zj - dj))
                .sum::<f64>();
        }
        Ok(total)
    }

    /// Per-example SSE gradients with respect to both weight matrices, plus
    /// the forward-pass output so training reuses one pass.
    fn example_gradients_with_output(
        &self,
        x: &[f64],
        d: &[f64],
    ) -> ((Array2<f64>, Array2<f64>), Vec<f64>) {
        let (hidden_act, z) = self.activations(x);
        let c = self.c();
        let h = self.h();

        // dL/dη_k through the softmax Jacobian z_j(δ_jk − z_k).
        let err_dot_z: f64 = z.iter().zip(d).map(|(&zj, &dj)| (zj - dj) * zj).sum();
        let mut delta_out = vec![0.0; c];
        for k in 0..c {
            delta_out[k] = z[k] * ((z[k] - d[k]) - err_dot_z);
        }

        let mut grad_output = Array2::zeros((c, h + 1));
        for j in 0..c {
            grad_output[(j, 0)] = delta_out[j];
            for m in 0..h {
                grad_output[(j, m + 1)] = delta_out[j] * hidden_act[m];
            }
        }

        let mut delta_hidden = vec![0.0; h];
        for (m, dh) in delta_hidden.iter_mut().enumerate() {
            let back: f64 = (0..c).map(|j| delta_out[j] * self.output[(j, m + 1)]).sum();
            *dh = back * hidden_act[m] * (1.0 - hidden_act[m]);
        }
        let q = self.q();
        let mut grad_hidden = Array2::zeros((h, q + 1));
        for m in 0..h {
            grad_hidden[(m, 0)] = delta_hidden[m];
            for k in 0..q {
                grad_hidden[(m, k + 1)] = delta_hidden[m] * x[k];
            }
        }
        ((grad_hidden, grad_output), z)
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

impl Predictor for BpNetwork {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
        if x.len() != self.q() {
            return Err(LdlError::DimensionMismatch {
                context: format!("network expects {} features, input has {}", self.q(), x.len()),
            });
        }
        let (_, z) = self.activations(x.values());
        LabelDistribution::new(z)
    }

    fn label_count(&self) -> usize {
        self.c()
    }

    fn feature_count(&self) -> usize {
        self.q()
    }

    fn algorithm(&self) -> &str {
        "aa-bp"
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("hidden_units".to_string(), self.h().to_string()),
            ("learning_rate".to_string(), self.config.learning_rate.to_string()),
            ("epochs".to_string(), self.config.epochs.to_string()),
            ("seed".to_string(), self.config.seed.to_string()),
        ]
    }
}

/// Per-epoch training loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLoss {
    pub epoch: usize,
    pub sse: f64,
}

/// CSV export of a loss trace: `epoch,sse`.
pub fn loss_trace_to_csv(trace: &[EpochLoss]) -> String {
    let mut out = String::from("epoch,sse\n");
    for r in trace {
        out.push_str(&format!("{},{:.17e}\n", r.epoch, r.sse));
    }
    out
}

/// Train a fresh network by sequential per-example gradient descent.
/// Weights start uniform on `(-init_scale, init_scale)` from a seeded
/// generator, so identical configs and data give bit-identical networks.
pub fn train(dataset: &LdlDataset, config: &BpConfig) -> Result<(BpNetwork, Vec<EpochLoss>)> {
    config.validate()?;
    let q = dataset.q();
    let c = dataset.c();
    let h = config.hidden_units;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draw = |rows: usize, cols: usize| {
        Array2::from_shape_fn((rows, cols), |_| {
            rng.gen_range(-config.init_scale..config.init_scale)
        })
    };
    let hidden = draw(h, q + 1);
    let output = draw(c, h + 1);
    let mut net = BpNetwork::from_weights(hidden, output, config.clone())?;

    let lr = config.learning_rate;
    let mut trace = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut sse = 0.0;
        for (x, d) in dataset.iter() {
            let ((grad_hidden, grad_output), z) =
                net.example_gradients_with_output(x.values(), d.degrees());
            sse += z
                .iter()
                .zip(d.degrees())
                .map(|(&zj, &dj)| 0.5 * (zj - dj) * (zj - dj))
                .sum::<f64>();
            net.hidden.zip_mut_with(&grad_hidden, |w, &g| *w -= lr * g);
            net.output.zip_mut_with(&grad_output, |w, &g| *w -= lr * g);
        }
        if !sse.is_finite() {
            return Err(LdlError::Diverged { epoch, loss: sse });
        }
        trace.push(EpochLoss { epoch, sse });
    }
    Ok((net, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn dataset(points: &[(&[f64], &[f64])]) -> LdlDataset {
        let features = points
            .iter()
            .map(|(x, _)| FeatureVector::new(x.to_vec()).unwrap())
            .collect();
        let targets = points
            .iter()
            .map(|(_, d)| LabelDistribution::new(d.to_vec()).unwrap())
            .collect();
        LdlDataset::new(features, targets, None).unwrap()
    }

    #[test]
    fn zero_output_weights_give_uniform() {
        let hidden = Array2::from_elem((4, 3), 0.7);
        let output = Array2::zeros((3, 5));
        let net = BpNetwork::from_weights(hidden, output, BpConfig::default()).unwrap();
        let p = net
            .predict(&FeatureVector::new(vec![0.5, -0.5]).unwrap())
            .unwrap();
        for &v in p.degrees() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_saturates_with_large_logit_gap() {
        // Hidden weights zero: activations are all σ(0) = ½. Output biases
        // (t, −t) with zero hidden→output weights give logits (t, −t).
        let hidden = Array2::zeros((2, 2));
        let mut output = Array2::zeros((2, 3));
        output[(0, 0)] = 40.0;
        output[(1, 0)] = -40.0;
        let net = BpNetwork::from_weights(hidden, output, BpConfig::default()).unwrap();
        let p = net.predict(&FeatureVector::new(vec![0.0]).unwrap()).unwrap();
        assert!(p.degrees()[0] > 1.0 - 1e-12);
        assert!(p.degrees()[1] < 1e-12);
    }

    #[test]
    fn random_network_outputs_stay_on_simplex() {
        let cfg = BpConfig {
            hidden_units: 8,
            seed: 5,
            ..BpConfig::default()
        };
        let data = dataset(&[(&[0.1, 0.2], &[0.6, 0.4])]);
        let (net, _) = train(&data, &BpConfig { epochs: 1, ..cfg }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = FeatureVector::new(vec![
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ])
            .unwrap();
            let p = net.predict(&x).unwrap();
            let sum: f64 = p.degrees().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(p.degrees().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn softmax_jacobian_matches_finite_differences() {
        // ∂z_j/∂η_k = z_j(δ_jk − z_k), checked through the softmax itself.
        let logits = [0.3, -1.2, 0.8];
        let h = 1e-6;
        let softmax = |v: &[f64]| {
            let mut z = v.to_vec();
            softmax_in_place(&mut z);
            z
        };
        let z = softmax(&logits);
        for j in 0..3 {
            for k in 0..3 {
                let mut plus = logits;
                plus[k] += h;
                let mut minus = logits;
                minus[k] -= h;
                let fd = (softmax(&plus)[j] - softmax(&minus)[j]) / (2.0 * h);
                let analytic = z[j] * (if j == k { 1.0 } else { 0.0 } - z[k]);
                assert!((fd - analytic).abs() < 1e-9, "({j},{k}): {fd} vs {analytic}");
            }
        }
    }

    #[test]
    fn backprop_gradient_matches_finite_differences() {
        // Tiny 3-unit network; perturb every weight of both layers.
        let cfg = BpConfig {
            hidden_units: 3,
            epochs: 1,
            seed: 21,
            ..BpConfig::default()
        };
        let data = dataset(&[(&[0.4, -0.3], &[0.2, 0.5, 0.3])]);
        let (net, _) = train(&data, &cfg).unwrap();
        let (x, d) = data.example(0);
        let ((grad_hidden, grad_output), _) =
            net.example_gradients_with_output(x.values(), d.degrees());
        let h = 1e-5;
        let loss = |net: &BpNetwork| net.sse(&data).unwrap();

        let mut check = |analytic: f64, perturb: &mut dyn FnMut(&mut BpNetwork, f64)| {
            let mut plus = net.clone();
            perturb(&mut plus, h);
            let mut minus = net.clone();
            perturb(&mut minus, -h);
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let err = (fd - analytic).abs() / f64::max(1.0, analytic.abs());
            assert!(err < 1e-5, "fd {fd} vs analytic {analytic}");
        };

        for m in 0..3 {
            for k in 0..3 {
                check(grad_hidden[(m, k)], &mut |n, eps| n.hidden[(m, k)] += eps);
            }
        }
        for j in 0..3 {
            for m in 0..4 {
                check(grad_output[(j, m)], &mut |n, eps| n.output[(j, m)] += eps);
            }
        }
    }

    #[test]
    fn memorizes_single_repeated_example() {
        let example: (&[f64], &[f64]) = (&[0.5, -0.2], &[0.7, 0.2, 0.1]);
        let data = dataset(&vec![example; 10]);
        let cfg = BpConfig {
            hidden_units: 8,
            seed: 3,
            ..BpConfig::default()
        };
        let (net, trace) = train(&data, &cfg).unwrap();
        let final_loss = trace.last().unwrap().sse;
        assert!(final_loss < 1e-4, "final SSE {final_loss}");
        let p = net
            .predict(&FeatureVector::new(example.0.to_vec()).unwrap())
            .unwrap();
        assert!((p.degrees()[0] - 0.7).abs() < 0.01);
    }

    #[test]
    fn loss_decreases_over_training() {
        let data = dataset(&[
            (&[0.0, 0.0], &[0.8, 0.2]),
            (&[1.0, 1.0], &[0.2, 0.8]),
            (&[0.5, -0.5], &[0.5, 0.5]),
        ]);
        let cfg = BpConfig {
            hidden_units: 6,
            epochs: 200,
            seed: 13,
            ..BpConfig::default()
        };
        let (_, trace) = train(&data, &cfg).unwrap();
        assert!(trace.last().unwrap().sse < trace[0].sse);
    }

    #[test]
    fn identical_seeds_give_bitwise_identical_networks() {
        let data = dataset(&[
            (&[0.0, 0.3], &[0.6, 0.4]),
            (&[-0.4, 0.9], &[0.1, 0.9]),
        ]);
        let cfg = BpConfig {
            hidden_units: 5,
            epochs: 50,
            seed: 42,
            ..BpConfig::default()
        };
        let (a, _) = train(&data, &cfg).unwrap();
        let (b, _) = train(&data, &cfg).unwrap();
        assert_eq!(a.hidden, b.hidden);
        assert_eq!(a.output, b.output);
        let (c, _) = train(&data, &BpConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.hidden, c.hidden);
    }

    #[test]
    fn loss_trace_csv_shape() {
        let trace = vec![EpochLoss { epoch: 0, sse: 1.5 }, EpochLoss { epoch: 1, sse: 0.7 }];
        let csv = loss_trace_to_csv(&trace);
        assert!(csv.starts_with("epoch,sse\n0,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
