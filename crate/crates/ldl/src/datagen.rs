//! Deterministic synthetic benchmark: a smooth ground-truth mapping from
//! `[-1,1]³` to three-label distributions, a seeded uniform training
//! sampler, a fixed 201×201 test manifold, and RGB rendering of per-cell
//! distributions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureVector, LabelDistribution, LdlDataset};
use crate::error::{LdlError, Result};

/// Grid resolution per axis of the test manifold.
pub const GRID_SIDE: usize = 201;
/// Total number of test-manifold cells.
pub const GRID_CELLS: usize = GRID_SIDE * GRID_SIDE;

/// Coefficients of the ground-truth generator. Each instance component is
/// pushed through the cubic `t_i = a·x_i + b·x_i² + c·x_i³ + d`; three
/// chained squared mixtures of `t` are then normalized into the label
/// distribution, each component deliberately depending on the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyParams {
    pub a: f64,
    pub b: f64,
    pub c_coef: f64,
    pub d: f64,
    pub w1: [f64; 3],
    pub w2: [f64; 3],
    pub w3: [f64; 3],
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for ToyParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 0.5,
            c_coef: 0.2,
            d: 1.0,
            w1: [4.0, 2.0, 1.0],
            w2: [1.0, 2.0, 4.0],
            w3: [1.0, 4.0, 2.0],
            lambda1: 0.01,
            lambda2: 0.01,
        }
    }
}

/// Ground-truth label distribution at `x`. The three mixture components are
/// squares, hence nonnegative; the normalized result is a valid
/// distribution unless all three vanish (a measure-zero event reported as
/// [`LdlError::DegenerateZero`]).
pub fn toy_distribution(x: &[f64; 3], params: &ToyParams) -> Result<LabelDistribution> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LdlError::NonFiniteInput {
            context: "toy_distribution input".to_string(),
        });
    }
    let t: [f64; 3] = std::array::from_fn(|i| {
        let xi = x[i];
        params.a * xi + params.b * xi * xi + params.c_coef * xi * xi * xi + params.d
    });
    let dot = |w: &[f64; 3]| w[0] * t[0] + w[1] * t[1] + w[2] * t[2];
    let psi1 = dot(&params.w1).powi(2);
    let psi2 = (dot(&params.w2) + params.lambda1 * psi1).powi(2);
    let psi3 = (dot(&params.w3) + params.lambda2 * psi2).powi(2);
    let sum = psi1 + psi2 + psi3;
    if sum <= 0.0 {
        return Err(LdlError::DegenerateZero);
    }
    LabelDistribution::new(vec![psi1 / sum, psi2 / sum, psi3 / sum])
}

/// Sample `n` training instances with components i.i.d. uniform on
/// `[-1, 1]`, labeled by the ground truth. Fixed seeds give bit-identical
/// datasets.
pub fn sample_training(n: usize, seed: u64, params: &ToyParams) -> Result<LdlDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        targets.push(toy_distribution(&x, params)?);
        features.push(FeatureVector::new(x.to_vec())?);
    }
    LdlDataset::new(features, targets, Some(label_names()))
}

fn label_names() -> Vec<String> {
    vec!["y1".to_string(), "y2".to_string(), "y3".to_string()]
}

/// Grid coordinate `−1 + 0.01·k`, computed from the integer index so the
/// grid carries no accumulation error.
fn grid_coord(k: usize) -> f64 {
    -1.0 + 0.01 * k as f64
}

/// The deterministic 40 401-instance test manifold: `x1, x2` on a 0.01 grid
/// over `[-1, 1]²` in row-major order (`x1` outer), `x3 = sin((x1+x2)π)`,
/// with ground-truth distributions attached.
pub fn test_manifold(params: &ToyParams) -> Result<LdlDataset> {
    let mut features = Vec::with_capacity(GRID_CELLS);
    let mut targets = Vec::with_capacity(GRID_CELLS);
    for i in 0..GRID_SIDE {
        let x1 = grid_coord(i);
        for j in 0..GRID_SIDE {
            let x2 = grid_coord(j);
            let x3 = ((x1 + x2) * std::f64::consts::PI).sin();
            let x = [x1, x2, x3];
            targets.push(toy_distribution(&x, params)?);
            features.push(FeatureVector::new(x.to_vec())?);
        }
    }
    LdlDataset::new(features, targets, Some(label_names()))
}

/// An 8-bit RGB image in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// `width * height * 3` bytes.
    pub pixels: Vec<u8>,
}

impl RgbImage {
    /// Serialize as binary PPM (`P6`, maxval 255).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Render one distribution per grid cell as an RGB pixel
/// (`channel = round(255·degree)`), row-major with the cell at
/// `(x1=−1, x2=−1)` in the top-left corner. With `stretch`, each channel is
/// first linearly rescaled to full range over the image.
pub fn render_manifold(distributions: &[LabelDistribution], stretch: bool) -> Result<RgbImage> {
    if distributions.len() != GRID_CELLS {
        return Err(LdlError::WrongCellCount {
            expected: GRID_CELLS,
            got: distributions.len(),
        });
    }
    if let Some(d) = distributions.iter().find(|d| d.len() != 3) {
        return Err(LdlError::WrongLabelCount { got: d.len() });
    }
    let mut channels: [Vec<f64>; 3] = [
        Vec::with_capacity(GRID_CELLS),
        Vec::with_capacity(GRID_CELLS),
        Vec::with_capacity(GRID_CELLS),
    ];
    for d in distributions {
        for (channel, &v) in channels.iter_mut().zip(d.degrees()) {
            channel.push(v);
        }
    }
    if stretch {
        for channel in &mut channels {
            let min = channel.iter().copied().fold(f64::INFINITY, f64::min);
            let max = channel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max > min {
                for v in channel.iter_mut() {
                    *v = (*v - min) / (max - min);
                }
            }
        }
    }
    let mut pixels = Vec::with_capacity(GRID_CELLS * 3);
    for cell in 0..GRID_CELLS {
        for channel in &channels {
            pixels.push((channel[cell] * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(RgbImage {
        width: GRID_SIDE,
        height: GRID_SIDE,
        pixels,
    })
}
