//! Versioned plain-text model persistence. A model file starts with
//! `LDLMODEL 1`, an algorithm tag line, and an optional standardizer block,
//! followed by algorithm-specific records. Floats carry 17 significant
//! digits, so a load/save round trip predicts bit-for-bit identically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use super::dataset::{parse_dataset, parse_f64, parse_usize, serialize_dataset, LineReader};
use crate::data::{FeatureVector, LabelDistribution, Predictor, Standardizer};
use crate::error::{LdlError, Result};
use crate::maxent::MaxEntModel;
use crate::neighbors::KnnModel;
use crate::neural::{BpConfig, BpNetwork};
use crate::transform::{pt_bayes_from_parts, GaussianClassModel, PtModel};

const MODEL_MAGIC: &str = "LDLMODEL";
const MODEL_VERSION: &str = "1";

/// A trained model of any supported algorithm.
#[derive(Debug, Clone)]
pub enum ModelKind {
    MaxEnt(MaxEntModel),
    Knn(KnnModel),
    Bp(BpNetwork),
    PtBayes(PtModel<GaussianClassModel>),
}

/// A persistable predictor: the algorithm-specific model plus the optional
/// feature standardizer it was trained behind.
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: ModelKind,
    pub standardizer: Option<Standardizer>,
}

impl Model {
    pub fn new(kind: ModelKind, standardizer: Option<Standardizer>) -> Self {
        Self { kind, standardizer }
    }

    fn inner(&self) -> &dyn Predictor {
        match &self.kind {
            ModelKind::MaxEnt(m) => m,
            ModelKind::Knn(m) => m,
            ModelKind::Bp(m) => m,
            ModelKind::PtBayes(m) => m,
        }
    }
}

impl Predictor for Model {
    fn predict(&self, x: &FeatureVector) -> Result<LabelDistribution> {
        match &self.standardizer {
            Some(std) => self.inner().predict(&std.transform_vector(x)?),
            None => self.inner().predict(x),
        }
    }

    fn label_count(&self) -> usize {
        self.inner().label_count()
    }

    fn feature_count(&self) -> usize {
        self.inner().feature_count()
    }

    fn algorithm(&self) -> &str {
        self.inner().algorithm()
    }

    fn params(&self) -> Vec<(String, String)> {
        let mut params = self.inner().params();
        params.push((
            "standardize".to_string(),
            self.standardizer.is_some().to_string(),
        ));
        params
    }
}

fn write_floats(out: &mut impl Write, values: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            write!(out, " ")?;
        }
        write!(out, "{v:.17e}")?;
        first = false;
    }
    writeln!(out)?;
    Ok(())
}

fn write_matrix(out: &mut impl Write, name: &str, m: &Array2<f64>) -> Result<()> {
    writeln!(out, "{name} {} {}", m.nrows(), m.ncols())?;
    for row in m.rows() {
        write_floats(out, row.iter().copied())?;
    }
    Ok(())
}

/// Persist a model to `path`.
pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}")?;
    writeln!(out, "algo {}", model.algorithm())?;
    match &model.standardizer {
        Some(std) => {
            writeln!(out, "standardizer 1")?;
            write_floats(&mut out, std.means().iter().copied())?;
            write_floats(&mut out, std.scales().iter().copied())?;
        }
        None => writeln!(out, "standardizer 0")?,
    }
    match &model.kind {
        ModelKind::MaxEnt(m) => {
            write_matrix(&mut out, "theta", m.theta())?;
        }
        ModelKind::Knn(m) => {
            writeln!(out, "k {}", m.k())?;
            serialize_dataset(m.training(), &mut out)?;
        }
        ModelKind::Bp(m) => {
            let cfg = m.config();
            writeln!(
                out,
                "config {} {:.17e} {} {} {:.17e}",
                cfg.hidden_units, cfg.learning_rate, cfg.epochs, cfg.seed, cfg.init_scale
            )?;
            write_matrix(&mut out, "hidden", m.hidden_weights())?;
            write_matrix(&mut out, "output", m.output_weights())?;
        }
        ModelKind::PtBayes(m) => {
            let gaussian = m.inner();
            let c = gaussian.priors().len();
            let q = gaussian.q();
            writeln!(out, "shape {c} {q}")?;
            writeln!(out, "seed {}", m.seed())?;
            write_floats(&mut out, gaussian.priors().iter().copied())?;
            for mean in gaussian.means() {
                write_floats(&mut out, mean.iter().copied())?;
            }
            for cov in gaussian.covariances() {
                for row in cov.rows() {
                    write_floats(&mut out, row.iter().copied())?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn read_floats<R: BufRead>(reader: &mut LineReader<R>, what: &str, expected: usize) -> Result<Vec<f64>> {
    let line = reader.expect_line(what)?;
    let values = line
        .split_whitespace()
        .map(|t| parse_f64(reader, t, what))
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != expected {
        return Err(reader.error(format!("expected {expected} {what} values, got {}", values.len())));
    }
    Ok(values)
}

fn read_matrix<R: BufRead>(reader: &mut LineReader<R>, name: &str) -> Result<Array2<f64>> {
    let header = reader.expect_line(name)?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 || tokens[0] != name {
        return Err(reader.error(format!("expected `{name} rows cols`, got `{header}`")));
    }
    let rows = parse_usize(reader, tokens[1], "row count")?;
    let cols = parse_usize(reader, tokens[2], "column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        data.extend(read_floats(reader, name, cols)?);
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| reader.error(e.to_string()))
}

/// Load a model persisted by [`save_model`].
pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut reader = LineReader::new(BufReader::new(file), path.display().to_string());

    let header = reader.expect_line("model header")?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MODEL_MAGIC) {
        return Err(reader.error("missing `LDLMODEL` magic"));
    }
    match parts.next() {
        Some(MODEL_VERSION) => {}
        Some(other) => {
            return Err(LdlError::VersionMismatch {
                found: other.to_string(),
                expected: MODEL_VERSION.to_string(),
            })
        }
        None => return Err(reader.error("missing model version")),
    }

    let algo_line = reader.expect_line("algorithm tag")?;
    let tag = algo_line
        .strip_prefix("algo ")
        .ok_or_else(|| reader.error("expected `algo <tag>`"))?
        .to_string();

    let std_line = reader.expect_line("standardizer flag")?;
    let standardizer = match std_line.as_str() {
        "standardizer 0" => None,
        "standardizer 1" => {
            let means_line = reader.expect_line("standardizer means")?;
            let means = means_line
                .split_whitespace()
                .map(|t| parse_f64(&reader, t, "standardizer mean"))
                .collect::<Result<Vec<f64>>>()?;
            let scales = read_floats(&mut reader, "standardizer scales", means.len())?;
            Some(Standardizer::from_parts(means, scales))
        }
        other => return Err(reader.error(format!("expected standardizer flag, got `{other}`"))),
    };

    let kind = match tag.as_str() {
        "sa-iis" | "sa-bfgs" | "maxent" => {
            let theta = read_matrix(&mut reader, "theta")?;
            ModelKind::MaxEnt(MaxEntModel::with_algorithm(theta, &tag)?)
        }
        "aa-knn" => {
            let k_line = reader.expect_line("k")?;
            let k = k_line
                .strip_prefix("k ")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| reader.error("expected `k <count>`"))?;
            let training = parse_dataset(&mut reader)?;
            ModelKind::Knn(KnnModel::fit(training, k)?)
        }
        "aa-bp" => {
            let cfg_line = reader.expect_line("config")?;
            let tokens: Vec<&str> = cfg_line.split_whitespace().collect();
            if tokens.len() != 6 || tokens[0] != "config" {
                return Err(reader.error("expected `config h lr epochs seed init_scale`"));
            }
            let config = BpConfig {
                hidden_units: parse_usize(&reader, tokens[1], "hidden units")?,
                learning_rate: parse_f64(&reader, tokens[2], "learning rate")?,
                epochs: parse_usize(&reader, tokens[3], "epochs")?,
                seed: tokens[4]
                    .parse()
                    .map_err(|_| reader.error("invalid seed"))?,
                init_scale: parse_f64(&reader, tokens[5], "init scale")?,
            };
            let hidden = read_matrix(&mut reader, "hidden")?;
            let output = read_matrix(&mut reader, "output")?;
            ModelKind::Bp(BpNetwork::from_weights(hidden, output, config)?)
        }
        "pt-bayes" => {
            let shape_line = reader.expect_line("shape")?;
            let tokens: Vec<&str> = shape_line.split_whitespace().collect();
            if tokens.len() != 3 || tokens[0] != "shape" {
                return Err(reader.error("expected `shape c q`"));
            }
            let c = parse_usize(&reader, tokens[1], "label count")?;
            let q = parse_usize(&reader, tokens[2], "feature count")?;
            let seed_line = reader.expect_line("seed")?;
            let seed: u64 = seed_line
                .strip_prefix("seed ")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| reader.error("expected `seed <value>`"))?;
            let priors = read_floats(&mut reader, "priors", c)?;
            let mut means = Vec::with_capacity(c);
            for _ in 0..c {
                means.push(read_floats(&mut reader, "mean", q)?);
            }
            let mut covariances = Vec::with_capacity(c);
            for _ in 0..c {
                let mut data = Vec::with_capacity(q * q);
                for _ in 0..q {
                    data.extend(read_floats(&mut reader, "covariance row", q)?);
                }
                covariances.push(
                    Array2::from_shape_vec((q, q), data).map_err(|e| reader.error(e.to_string()))?,
                );
            }
            let gaussian = GaussianClassModel::from_parts(priors, means, covariances)?;
            ModelKind::PtBayes(pt_bayes_from_parts(gaussian, q, c, seed))
        }
        _ => return Err(LdlError::UnknownAlgorithmTag { tag }),
    };
    Ok(Model { kind, standardizer })
}
