//! Nested ten-fold cross-validation: one chunk tests, the next chunk
//! validates hyperparameters, the remaining eight train. The grid setting
//! with the best average validation score (mean Kullback-Leibler divergence)
//! is selected once over all folds; the validation chunk is then merged into
//! the training chunks and the selected setting is retrained and tested per
//! fold.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{LdlDataset, Predictor};
use crate::error::{LdlError, Result};
use crate::measures::{evaluate_all, MeasureId, MeasureVector};

/// Fold assignment per example, produced by a seeded shuffle followed by
/// round-robin allocation, so fold sizes differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvPlan {
    assignments: Vec<usize>,
    folds: usize,
    seed: u64,
}

/// Build a fold plan for `n` examples.
pub fn make_cv_plan(n: usize, folds: usize, seed: u64) -> Result<CvPlan> {
    if folds < 2 || n < folds {
        return Err(LdlError::TooFewExamples { n, folds });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut assignments = vec![0usize; n];
    for (position, &example) in order.iter().enumerate() {
        assignments[example] = position % folds;
    }
    Ok(CvPlan {
        assignments,
        folds,
        seed,
    })
}

impl CvPlan {
    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    /// Example indices assigned to `fold`.
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// (test, validation, train) index sets for `fold`; validation is the
    /// next fold cyclically.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let validation_fold = (fold + 1) % self.folds;
        let mut test = Vec::new();
        let mut validation = Vec::new();
        let mut train = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else if f == validation_fold {
                validation.push(i);
            } else {
                train.push(i);
            }
        }
        (test, validation, train)
    }
}

/// An algorithm the harness can train: a fixed list of candidate
/// hyperparameter settings plus a fit function.
pub trait CvLearner: Sync {
    fn name(&self) -> &str;

    /// Human-readable labels of the candidate settings (at least one).
    fn candidates(&self) -> Vec<String>;

    /// Train the given candidate on `data`. `seed` is derived from the run
    /// seed and the fold, so retraining is reproducible.
    fn fit(&self, candidate: usize, data: &LdlDataset, seed: u64) -> Result<Box<dyn Predictor>>;
}

/// Which examples each stage of one fold saw; test overlap with either
/// training stage is a harness bug.
#[derive(Debug, Clone)]
pub struct FoldAudit {
    pub fold: usize,
    pub train_indices: Vec<usize>,
    pub validation_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Aggregate nested-CV result for one algorithm.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub algorithm: String,
    /// Label of the selected grid candidate.
    pub selected: String,
    /// Mean validation KL per candidate (the selection criterion).
    pub candidate_scores: Vec<f64>,
    /// Six-measure results per fold.
    pub fold_measures: Vec<MeasureVector>,
    pub mean: MeasureVector,
    /// Sample standard deviation across folds.
    pub std: MeasureVector,
    pub audits: Vec<FoldAudit>,
}

fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut state = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        state = state.wrapping_add(p).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        state ^= state >> 31;
    }
    state
}

/// Run `job(0..count)` on up to `threads` workers, returning results in
/// index order. Each job must depend only on its index, so scheduling cannot
/// change the output.
pub(crate) fn run_indexed<T, F>(threads: usize, count: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if threads <= 1 || count <= 1 {
        return (0..count).map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(count) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let result = job(i);
                *slots[i].lock().expect("poisoned") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("poisoned").expect("job ran"))
        .collect()
}

/// Nested cross-validation of one learner. `threads` caps the number of
/// concurrent fold tasks (0 or 1 runs sequentially); results are identical
/// for any worker count.
pub fn nested_cv(
    dataset: &LdlDataset,
    learner: &dyn CvLearner,
    plan: &CvPlan,
    threads: usize,
) -> Result<CvOutcome> {
    if plan.n() != dataset.n() {
        return Err(LdlError::DimensionMismatch {
            context: format!("plan covers {} examples, dataset has {}", plan.n(), dataset.n()),
        });
    }
    let candidates = learner.candidates();
    if candidates.is_empty() {
        return Err(LdlError::DimensionMismatch {
            context: format!("learner {} has no candidate settings", learner.name()),
        });
    }
    let folds = plan.folds();

    // Selection stage: score every candidate on every fold's validation
    // chunk, training on the eight remaining chunks.
    let candidate_scores: Vec<f64> = if candidates.len() == 1 {
        vec![f64::NAN]
    } else {
        let jobs = candidates.len() * folds;
        let scores = run_indexed(threads, jobs, |job| -> Result<f64> {
            let candidate = job / folds;
            let fold = job % folds;
            let (_, validation, train) = plan.split(fold);
            let train_set = dataset.subset(&train)?;
            let validation_set = dataset.subset(&validation)?;
            let seed = mix_seed(plan.seed(), &[1, candidate as u64, fold as u64]);
            let model = learner
                .fit(candidate, &train_set, seed)
                .map_err(|e| e.in_fold(fold))?;
            let measures = evaluate_all(&model, &validation_set).map_err(|e| e.in_fold(fold))?;
            Ok(measures.get(MeasureId::KlDivergence))
        });
        let mut means = vec![0.0; candidates.len()];
        for (job, score) in scores.into_iter().enumerate() {
            means[job / folds] += score? / folds as f64;
        }
        means
    };
    let selected = if candidates.len() == 1 {
        0
    } else {
        candidate_scores
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("nonempty candidates")
    };

    // Final stage: merge validation into training and test the selected
    // setting on each fold.
    let fold_runs = run_indexed(threads, folds, |fold| -> Result<(MeasureVector, FoldAudit)> {
        let (test, validation, mut train) = plan.split(fold);
        train.extend(validation.iter().copied());
        let train_set = dataset.subset(&train).map_err(|e| e.in_fold(fold))?;
        let test_set = dataset.subset(&test).map_err(|e| e.in_fold(fold))?;
        let seed = mix_seed(plan.seed(), &[2, fold as u64]);
        let model = learner
            .fit(selected, &train_set, seed)
            .map_err(|e| e.in_fold(fold))?;
        let measures = evaluate_all(&model, &test_set).map_err(|e| e.in_fold(fold))?;
        Ok((
            measures,
            FoldAudit {
                fold,
                train_indices: train,
                validation_indices: validation,
                test_indices: test,
            },
        ))
    });

    let mut fold_measures = Vec::with_capacity(folds);
    let mut audits = Vec::with_capacity(folds);
    for run in fold_runs {
        let (m, audit) = run?;
        fold_measures.push(m);
        audits.push(audit);
    }

    let mut mean = [0.0f64; 6];
    for m in &fold_measures {
        for (acc, v) in mean.iter_mut().zip(m.values()) {
            *acc += v / folds as f64;
        }
    }
    let mut std = [0.0f64; 6];
    for m in &fold_measures {
        for ((acc, v), mu) in std.iter_mut().zip(m.values()).zip(&mean) {
            *acc += (v - mu) * (v - mu);
        }
    }
    for v in &mut std {
        *v = (*v / (folds as f64 - 1.0)).sqrt();
    }

    Ok(CvOutcome {
        algorithm: learner.name().to_string(),
        selected: candidates[selected].clone(),
        candidate_scores,
        fold_measures,
        mean: MeasureVector::new(mean),
        std: MeasureVector::new(std),
        audits,
    })
}
