//! The six distance/similarity measures between label distributions, plus
//! aggregation into per-algorithm reports with average ranks.
//!
//! Chebyshev, Clark, Canberra, and Kullback-Leibler are distances (smaller is
//! better); cosine and intersection are similarities (larger is better). Each
//! comes from a different syntactic family, so together they expose different
//! aspects of a predictor.

use std::fmt::Write as _;

use crate::data::{LabelDistribution, LdlDataset, Predictor, LOG_CLAMP};
use crate::error::{LdlError, Result};

/// Identifier for one of the six selected measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureId {
    Chebyshev,
    Clark,
    Canberra,
    KlDivergence,
    Cosine,
    Intersection,
}

impl MeasureId {
    /// All six measures in report order.
    pub const ALL: [MeasureId; 6] = [
        MeasureId::Chebyshev,
        MeasureId::Clark,
        MeasureId::Canberra,
        MeasureId::KlDivergence,
        MeasureId::Cosine,
        MeasureId::Intersection,
    ];

    /// Distances are minimized, similarities maximized.
    pub fn is_distance(self) -> bool {
        !matches!(self, MeasureId::Cosine | MeasureId::Intersection)
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasureId::Chebyshev => "Chebyshev",
            MeasureId::Clark => "Clark",
            MeasureId::Canberra => "Canberra",
            MeasureId::KlDivergence => "Kullback-Leibler",
            MeasureId::Cosine => "Cosine",
            MeasureId::Intersection => "Intersection",
        }
    }

    /// Apply this measure to a (true, predicted) pair.
    pub fn compute(self, d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
        match self {
            MeasureId::Chebyshev => chebyshev(d, p),
            MeasureId::Clark => clark(d, p),
            MeasureId::Canberra => canberra(d, p),
            MeasureId::KlDivergence => kl_divergence(d, p),
            MeasureId::Cosine => cosine(d, p),
            MeasureId::Intersection => intersection(d, p),
        }
    }
}

fn check_pair(d: &LabelDistribution, p: &LabelDistribution) -> Result<()> {
    if d.len() != p.len() {
        return Err(LdlError::DimensionMismatch {
            context: format!("distributions of length {} vs {}", d.len(), p.len()),
        });
    }
    Ok(())
}

/// Largest per-label absolute difference; in `[0, 1]`.
pub fn chebyshev(d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
    check_pair(d, p)?;
    Ok(d.degrees()
        .iter()
        .zip(p.degrees())
        .map(|(&a, &b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `sqrt(sum((d-p)^2 / (d+p)^2))`; 0/0 terms contribute 0. In `[0, sqrt(c)]`.
///
/// A label with zero true degree but positive predicted mass contributes a
/// full 1 to the sum, which makes this measure sensitive to near-zero
/// description degrees.
pub fn clark(d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
    check_pair(d, p)?;
    let mut sum = 0.0;
    for (&a, &b) in d.degrees().iter().zip(p.degrees()) {
        let denom = a + b;
        if denom > 0.0 {
            let r = (a - b) / denom;
            sum += r * r;
        }
    }
    Ok(sum.sqrt())
}

/// `sum(|d-p| / (d+p))`; 0/0 terms contribute 0. In `[0, c]`.
pub fn canberra(d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
    check_pair(d, p)?;
    let mut sum = 0.0;
    for (&a, &b) in d.degrees().iter().zip(p.degrees()) {
        let denom = a + b;
        if denom > 0.0 {
            sum += (a - b).abs() / denom;
        }
    }
    Ok(sum)
}

/// `sum(d * ln(d/p))` with `0 ln 0 := 0` and `p` clamped at [`LOG_CLAMP`].
/// Nonnegative; asymmetric in its arguments.
pub fn kl_divergence(d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
    check_pair(d, p)?;
    let mut sum = 0.0;
    for (&a, &b) in d.degrees().iter().zip(p.degrees()) {
        if a > 0.0 {
            sum += a * (a / b.max(LOG_CLAMP)).ln();
        }
    }
    Ok(sum)
}

/// Inner product over the product of Euclidean norms; in `[0, 1]` for
/// distributions.
pub fn cosine(d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
    check_pair(d, p)?;
    let mut dot = 0.0;
    let mut nd = 0.0;
    let mut np = 0.0;
    for (&a, &b) in d.degrees().iter().zip(p.degrees()) {
        dot += a * b;
        nd += a * a;
        np += b * b;
    }
    Ok(dot / (nd.sqrt() * np.sqrt()))
}

/// Sum of per-label minima; in `[0, 1]`, equal to 1 iff the distributions
/// coincide.
pub fn intersection(d: &LabelDistribution, p: &LabelDistribution) -> Result<f64> {
    check_pair(d, p)?;
    Ok(d.degrees()
        .iter()
        .zip(p.degrees())
        .map(|(&a, &b)| a.min(b))
        .sum())
}

/// The six measure values for one predictor, in [`MeasureId::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureVector {
    values: [f64; 6],
}

impl MeasureVector {
    pub fn new(values: [f64; 6]) -> Self {
        Self { values }
    }

    pub fn get(&self, id: MeasureId) -> f64 {
        let idx = MeasureId::ALL.iter().position(|&m| m == id).unwrap();
        self.values[idx]
    }

    pub fn values(&self) -> &[f64; 6] {
        &self.values
    }
}

/// Mean of each measure over all examples of `test`, predicting with
/// `predictor`.
pub fn evaluate_all<P: Predictor + ?Sized>(
    predictor: &P,
    test: &LdlDataset,
) -> Result<MeasureVector> {
    crate::data::check_dims(test, predictor)?;
    if test.n() == 0 {
        return Err(LdlError::EmptyTestSet);
    }
    let mut sums = [0.0f64; 6];
    for (x, d) in test.iter() {
        let p = predictor.predict(x)?;
        for (slot, id) in sums.iter_mut().zip(MeasureId::ALL) {
            *slot += id.compute(d, &p)?;
        }
    }
    let n = test.n() as f64;
    for slot in &mut sums {
        *slot /= n;
    }
    Ok(MeasureVector::new(sums))
}

/// One algorithm's aggregate results feeding into a ranked report.
#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub algorithm: String,
    pub means: MeasureVector,
    /// Standard deviation across CV folds; absent for single fixed-split runs.
    pub stds: Option<MeasureVector>,
    /// Free-form metadata lines (selected hyperparameters, seeds).
    pub notes: Vec<String>,
}

/// Per-(algorithm, measure) mean, std, and rank, plus per-algorithm average
/// rank. Rank 1 is the best value under the measure's polarity; ties receive
/// the mean of the tied positions.
#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub algorithms: Vec<String>,
    pub means: Vec<MeasureVector>,
    pub stds: Vec<Option<MeasureVector>>,
    /// `ranks[algo][measure]`.
    pub ranks: Vec<[f64; 6]>,
    pub avg_ranks: Vec<f64>,
    pub notes: Vec<String>,
}

/// Rank algorithms per measure and compute average ranks.
pub fn rank_report(results: &[AlgorithmResult]) -> Result<EvaluationReport> {
    if results.len() < 2 {
        return Err(LdlError::DimensionMismatch {
            context: format!("ranking needs at least 2 algorithms, got {}", results.len()),
        });
    }
    for r in results {
        if let Some(id) = MeasureId::ALL.iter().find(|&&m| !r.means.get(m).is_finite()) {
            return Err(LdlError::MissingMeasure {
                algorithm: r.algorithm.clone(),
                measure: id.name().to_string(),
            });
        }
    }

    let a = results.len();
    let mut ranks = vec![[0.0f64; 6]; a];
    for (mi, &measure) in MeasureId::ALL.iter().enumerate() {
        // Orient so that smaller key = better, then assign mean-of-tied ranks.
        let keys: Vec<f64> = results
            .iter()
            .map(|r| {
                let v = r.means.get(measure);
                if measure.is_distance() {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let mut order: Vec<usize> = (0..a).collect();
        order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]));
        let mut pos = 0;
        while pos < a {
            let mut end = pos + 1;
            while end < a && keys[order[end]] == keys[order[pos]] {
                end += 1;
            }
            // Positions pos..end are tied; ranks are 1-based.
            let mean_rank = (pos + 1..=end).map(|r| r as f64).sum::<f64>() / (end - pos) as f64;
            for &idx in &order[pos..end] {
                ranks[idx][mi] = mean_rank;
            }
            pos = end;
        }
    }

    let avg_ranks = ranks
        .iter()
        .map(|row| row.iter().sum::<f64>() / 6.0)
        .collect();
    let mut notes = Vec::new();
    for r in results {
        notes.extend(r.notes.iter().cloned());
    }
    Ok(EvaluationReport {
        algorithms: results.iter().map(|r| r.algorithm.clone()).collect(),
        means: results.iter().map(|r| r.means).collect(),
        stds: results.iter().map(|r| r.stds).collect(),
        ranks,
        avg_ranks,
        notes,
    })
}

fn format_rank(rank: f64) -> String {
    if rank.fract() == 0.0 {
        format!("{}", rank as i64)
    } else {
        format!("{rank:.1}")
    }
}

fn format_cell(mean: f64, std: Option<f64>, rank: f64) -> String {
    match std {
        Some(s) => format!("{mean:.4}±{s:.4}({})", format_rank(rank)),
        None => format!("{mean:.4}({})", format_rank(rank)),
    }
}

impl EvaluationReport {
    /// Aligned plain-text table: one row per measure, one column per
    /// algorithm, cells `mean±std(rank)`, closing with an average-rank row.
    pub fn to_table(&self) -> String {
        let mut header: Vec<String> = vec!["Criterion".to_string()];
        header.extend(self.algorithms.iter().cloned());

        let mut rows: Vec<Vec<String>> = Vec::new();
        for (mi, measure) in MeasureId::ALL.iter().enumerate() {
            let arrow = if measure.is_distance() { "↓" } else { "↑" };
            let mut row = vec![format!("{} {arrow}", measure.name())];
            for ai in 0..self.algorithms.len() {
                row.push(format_cell(
                    self.means[ai].values()[mi],
                    self.stds[ai].map(|s| s.values()[mi]),
                    self.ranks[ai][mi],
                ));
            }
            rows.push(row);
        }
        let mut avg_row = vec!["Avg. Rank".to_string()];
        for &r in &self.avg_ranks {
            avg_row.push(format!("{r:.2}"));
        }
        rows.push(avg_row);

        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let write_row = |out: &mut String, row: &[String]| {
            for (i, (cell, w)) in row.iter().zip(&widths).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                let pad = w - cell.chars().count();
                out.push_str(cell);
                out.push_str(&" ".repeat(pad));
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        write_row(&mut out, &header);
        for row in &rows {
            write_row(&mut out, row);
        }
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out
    }

    /// CSV with columns `algorithm,measure,mean,std,rank` (std empty when
    /// absent), then `algorithm,avg_rank,…` summary rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("algorithm,measure,mean,std,rank\n");
        for (ai, algo) in self.algorithms.iter().enumerate() {
            for (mi, measure) in MeasureId::ALL.iter().enumerate() {
                let std = self.stds[ai]
                    .map(|s| format!("{:.17e}", s.values()[mi]))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{algo},{},{:.17e},{std},{}",
                    measure.name(),
                    self.means[ai].values()[mi],
                    self.ranks[ai][mi],
                );
            }
        }
        for (ai, algo) in self.algorithms.iter().enumerate() {
            let _ = writeln!(out, "{algo},avg_rank,{:.17e},,", self.avg_ranks[ai]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureVector;

    fn dist(v: &[f64]) -> LabelDistribution {
        LabelDistribution::new(v.to_vec()).unwrap()
    }

    // Frozen oracle values for D=[0.5,0.5], P=[0.9,0.1], computed with
    // 60-digit arithmetic.
    const CLARK_HALF_NINE: f64 = 0.7253117243679912653;
    const CANBERRA_HALF_NINE: f64 = 0.95238095238095238095;
    const KL_HALF_NINE: f64 = 0.51082562376599068321;
    const COSINE_HALF_NINE: f64 = 0.78086880944303032762;

    #[test]
    fn chebyshev_examples() {
        let d = dist(&[0.5, 0.5]);
        assert_eq!(chebyshev(&d, &d).unwrap(), 0.0);
        assert!((chebyshev(&d, &dist(&[0.9, 0.1])).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(chebyshev(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn clark_examples() {
        let d = dist(&[0.5, 0.5]);
        assert_eq!(clark(&d, &d).unwrap(), 0.0);
        let got = clark(&d, &dist(&[0.9, 0.1])).unwrap();
        assert!((got - CLARK_HALF_NINE).abs() < 1e-15, "got {got}");
        let max = clark(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap();
        assert!((max - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn canberra_examples() {
        let d = dist(&[0.5, 0.5]);
        assert_eq!(canberra(&d, &d).unwrap(), 0.0);
        let got = canberra(&d, &dist(&[0.9, 0.1])).unwrap();
        assert!((got - CANBERRA_HALF_NINE).abs() < 1e-15, "got {got}");
        assert!((canberra(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kl_examples() {
        let d = dist(&[0.4, 0.6]);
        assert_eq!(kl_divergence(&d, &d).unwrap(), 0.0);
        let got = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[0.9, 0.1])).unwrap();
        assert!((got - KL_HALF_NINE).abs() < 1e-15, "got {got}");
        let got = kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((got - 2.0f64.ln()).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn kl_is_asymmetric() {
        let a = dist(&[0.8, 0.2]);
        let b = dist(&[0.5, 0.5]);
        let ab = kl_divergence(&a, &b).unwrap();
        let ba = kl_divergence(&b, &a).unwrap();
        assert!((ab - 0.19274475702175742988).abs() < 1e-15);
        assert!((ba - 0.22314355131420975577).abs() < 1e-15);
        assert!((ab - ba).abs() > 0.01);
    }

    #[test]
    fn cosine_examples() {
        let d = dist(&[0.3, 0.7]);
        assert!((cosine(&d, &d).unwrap() - 1.0).abs() < 1e-15);
        let got = cosine(&dist(&[0.5, 0.5]), &dist(&[0.9, 0.1])).unwrap();
        assert!((got - COSINE_HALF_NINE).abs() < 1e-15, "got {got}");
        assert_eq!(cosine(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn intersection_examples() {
        let d = dist(&[0.3, 0.7]);
        assert!((intersection(&d, &d).unwrap() - 1.0).abs() < 1e-15);
        let got = intersection(&dist(&[0.5, 0.5]), &dist(&[0.9, 0.1])).unwrap();
        assert!((got - 0.6).abs() < 1e-15);
        assert_eq!(intersection(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn zero_degree_terms_contribute_one_to_canberra_and_clark_squared() {
        // m labels with zero true degree but positive prediction each add 1
        // to Canberra and 1 to Clark².
        let d = dist(&[0.5, 0.5, 0.0, 0.0]);
        let p = dist(&[0.5, 0.3, 0.1, 0.1]);
        let canb = canberra(&d, &p).unwrap();
        let base = 0.0 + 0.2 / 0.8;
        assert!((canb - (base + 2.0)).abs() < 1e-12, "got {canb}");
        let cl = clark(&d, &p).unwrap();
        let base_sq = (0.2f64 / 0.8).powi(2);
        assert!((cl * cl - (base_sq + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let d = dist(&[0.5, 0.5]);
        let p = dist(&[0.4, 0.3, 0.3]);
        for m in MeasureId::ALL {
            assert!(matches!(
                m.compute(&d, &p),
                Err(LdlError::DimensionMismatch { .. })
            ));
        }
    }

    struct EchoPredictor {
        c: usize,
    }

    impl Predictor for EchoPredictor {
        fn predict(&self, x: &FeatureVector) -> crate::error::Result<LabelDistribution> {
            LabelDistribution::new(x.values().to_vec())
        }
        fn label_count(&self) -> usize {
            self.c
        }
        fn feature_count(&self) -> usize {
            self.c
        }
        fn algorithm(&self) -> &str {
            "echo"
        }
    }

    fn pair_dataset(targets: &[&[f64]], predictions: &[&[f64]]) -> LdlDataset {
        let features = predictions
            .iter()
            .map(|p| FeatureVector::new(p.to_vec()).unwrap())
            .collect();
        let dists = targets.iter().map(|t| dist(t)).collect();
        LdlDataset::new(features, dists, None).unwrap()
    }

    #[test]
    fn evaluate_all_perfect_predictor() {
        let data = pair_dataset(&[&[0.2, 0.8], &[0.6, 0.4]], &[&[0.2, 0.8], &[0.6, 0.4]]);
        let m = evaluate_all(&EchoPredictor { c: 2 }, &data).unwrap();
        assert!(m.get(MeasureId::Chebyshev).abs() < 1e-12);
        assert!(m.get(MeasureId::Clark).abs() < 1e-12);
        assert!(m.get(MeasureId::Canberra).abs() < 1e-12);
        assert!(m.get(MeasureId::KlDivergence).abs() < 1e-12);
        assert!((m.get(MeasureId::Cosine) - 1.0).abs() < 1e-12);
        assert!((m.get(MeasureId::Intersection) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_all_single_example_equals_pair_measure() {
        let data = pair_dataset(&[&[0.5, 0.5]], &[&[0.9, 0.1]]);
        let m = evaluate_all(&EchoPredictor { c: 2 }, &data).unwrap();
        assert!((m.get(MeasureId::Clark) - CLARK_HALF_NINE).abs() < 1e-15);
    }

    #[test]
    fn evaluate_all_two_examples_is_mean() {
        // Second pair is identical, so the mean halves the single-pair value.
        let data = pair_dataset(&[&[0.5, 0.5], &[0.3, 0.7]], &[&[0.9, 0.1], &[0.3, 0.7]]);
        let m = evaluate_all(&EchoPredictor { c: 2 }, &data).unwrap();
        let direct = [
            chebyshev(&dist(&[0.5, 0.5]), &dist(&[0.9, 0.1])).unwrap(),
            chebyshev(&dist(&[0.3, 0.7]), &dist(&[0.3, 0.7])).unwrap(),
        ];
        let expected = (direct[0] + direct[1]) / 2.0;
        assert!((m.get(MeasureId::Chebyshev) - expected).abs() < 1e-15);
    }

    fn result(name: &str, values: [f64; 6]) -> AlgorithmResult {
        AlgorithmResult {
            algorithm: name.to_string(),
            means: MeasureVector::new(values),
            stds: None,
            notes: vec![],
        }
    }

    #[test]
    fn dominant_algorithm_ranks_first_everywhere() {
        // A beats B on all measures (respecting polarity).
        let a = result("A", [0.1, 0.2, 0.3, 0.05, 0.99, 0.95]);
        let b = result("B", [0.2, 0.4, 0.6, 0.10, 0.90, 0.85]);
        let report = rank_report(&[a, b]).unwrap();
        assert_eq!(report.avg_ranks, vec![1.0, 2.0]);
    }

    #[test]
    fn ties_share_mean_rank() {
        let a = result("A", [0.1, 0.2, 0.3, 0.05, 0.99, 0.95]);
        let mut b = result("B", [0.2, 0.4, 0.6, 0.10, 0.90, 0.85]);
        // Tie on the first measure.
        let mut vals = *b.means.values();
        vals[0] = 0.1;
        b.means = MeasureVector::new(vals);
        let report = rank_report(&[a, b]).unwrap();
        assert_eq!(report.ranks[0][0], 1.5);
        assert_eq!(report.ranks[1][0], 1.5);
    }

    /// Published artificial-benchmark results for the six algorithms.
    /// The Kullback-Leibler row prints 0.030 for both PT-Bayes and SA-BFGS;
    /// their published ranks (3) and (2) pin the underlying order, so the
    /// SA-BFGS entry here carries one disambiguating digit below print
    /// precision.
    #[test]
    fn published_benchmark_means_reproduce_average_ranks() {
        let results = vec![
            result("PT-Bayes", [0.080, 0.341, 0.488, 0.0300, 0.990, 0.920]),
            result("PT-SVM", [0.653, 1.135, 1.823, 1.482, 0.377, 0.347]),
            result("AA-kNN", [0.086, 0.382, 0.564, 0.035, 0.989, 0.914]),
            result("AA-BP", [0.101, 0.520, 0.699, 0.066, 0.983, 0.899]),
            result("SA-IIS", [0.0767, 0.349, 0.489, 0.029, 0.99116, 0.9233]),
            result("SA-BFGS", [0.0766, 0.352, 0.495, 0.0299, 0.99120, 0.9234]),
        ];
        let report = rank_report(&results).unwrap();
        let expected = [14.0 / 6.0, 6.0, 4.0, 5.0, 11.0 / 6.0, 11.0 / 6.0];
        for (got, want) in report.avg_ranks.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        // Rounded to two decimals these are the published 2.33 / 6.00 / 4.00
        // / 5.00 / 1.83 / 1.83.
        assert_eq!(format!("{:.2}", report.avg_ranks[5]), "1.83");
        assert_eq!(format!("{:.2}", report.avg_ranks[1]), "6.00");
    }

    #[test]
    fn report_renders_table_and_csv() {
        let results = vec![
            result("A", [0.1, 0.2, 0.3, 0.05, 0.99, 0.95]),
            result("B", [0.2, 0.4, 0.6, 0.10, 0.90, 0.85]),
        ];
        let report = rank_report(&results).unwrap();
        let table = report.to_table();
        assert!(table.contains("Avg. Rank"));
        assert!(table.contains("Chebyshev ↓"));
        assert!(table.contains("Cosine ↑"));
        let csv = report.to_csv();
        assert!(csv.starts_with("algorithm,measure,mean,std,rank"));
        assert!(csv.contains("A,avg_rank,"));
        // Std column empty when absent.
        assert!(csv.lines().nth(1).unwrap().contains(",,1"));
    }

    #[test]
    fn missing_measure_rejected() {
        let a = result("A", [0.1, 0.2, 0.3, f64::NAN, 0.99, 0.95]);
        let b = result("B", [0.2, 0.4, 0.6, 0.10, 0.90, 0.85]);
        assert!(matches!(
            rank_report(&[a, b]),
            Err(LdlError::MissingMeasure { .. })
        ));
    }
}
