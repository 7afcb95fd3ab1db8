//! Quasi-Newton training of the maximum-entropy model: inverse-Hessian
//! updates plus a strong-Wolfe line search on `T'(θ) = −T(θ)`.

use std::time::Instant;

use ndarray::{Array1, Array2};

use super::wolfe::{strong_wolfe, LineSearchOutcome};
use super::{BfgsConfig, ConvergenceStatus, MaxEntModel, Problem, TraceRecord, TrainOutcome};
use crate::data::LdlDataset;
use crate::error::{LdlError, Result};

/// Apply the inverse-Hessian update
/// `B' = (I − ρ s uᵀ) B (I − ρ u sᵀ) + ρ s sᵀ` with `ρ = 1/(sᵀu)`.
///
/// `s` is the parameter step, `u` the gradient change. Errors with
/// [`LdlError::CurvatureViolation`] when `sᵀu ≤ 1e-12·‖s‖‖u‖`; callers
/// skip the update in that case. The result satisfies the secant condition
/// `B'u = s` and stays symmetric positive definite when `B` was.
pub fn bfgs_update(b: &Array2<f64>, s: &Array1<f64>, u: &Array1<f64>) -> Result<Array2<f64>> {
    let s_dot_u = s.dot(u);
    let s_norm = s.dot(s).sqrt();
    let u_norm = u.dot(u).sqrt();
    if s_dot_u <= 1e-12 * s_norm * u_norm {
        return Err(LdlError::CurvatureViolation { s_dot_u });
    }
    let rho = 1.0 / s_dot_u;
    let bu = b.dot(u);
    let utb = b.t().dot(u);
    let utbu = u.dot(&bu);
    let m = b.nrows();
    let mut out = b.clone();
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] += -rho * s[i] * utb[j] - rho * bu[i] * s[j]
                + (rho * rho * utbu + rho) * s[i] * s[j];
        }
    }
    Ok(out)
}

/// Everything observable about one accepted BFGS iteration, for independent
/// re-verification of the Wolfe conditions and the secant property.
#[derive(Debug)]
pub struct BfgsStep<'a> {
    pub iteration: usize,
    pub theta_before: &'a [f64],
    pub direction: &'a [f64],
    pub alpha: f64,
    /// Parameter step `θ_after − θ_before`.
    pub s: &'a [f64],
    /// Gradient change `∇T'(θ_after) − ∇T'(θ_before)`.
    pub u: &'a [f64],
    /// Inverse-Hessian approximation after the update; `None` when the
    /// curvature check skipped the update.
    pub b_after: Option<&'a Array2<f64>>,
}

/// Strong-Wolfe line search on `T'` from the model's parameters along
/// `direction` (same shape as θ). Exposed for direct verification; training
/// uses the same code path.
pub fn line_search(
    model: &MaxEntModel,
    dataset: &LdlDataset,
    direction: &Array2<f64>,
    config: &BfgsConfig,
) -> Result<LineSearchOutcome> {
    config.validate()?;
    let problem = Problem::from_dataset(dataset, config.l2)?;
    problem.check_theta(model.theta())?;
    if direction.dim() != model.theta().dim() {
        return Err(LdlError::DimensionMismatch {
            context: "direction shape differs from theta".to_string(),
        });
    }
    let shape = model.theta().dim();
    let objective = flat_objective(&problem, shape);
    let x0: Vec<f64> = model.theta().iter().copied().collect();
    let dir: Vec<f64> = direction.iter().copied().collect();
    let (f0, g0) = objective(&x0);
    strong_wolfe(
        &objective,
        &x0,
        f0,
        &g0,
        &dir,
        config.c1,
        config.c2,
        config.max_line_search_steps,
    )
}

fn flat_objective(problem: &Problem, shape: (usize, usize)) -> impl Fn(&[f64]) -> (f64, Vec<f64>) + '_ {
    move |flat: &[f64]| {
        let theta = Array2::from_shape_vec(shape, flat.to_vec()).expect("shape");
        let (f, grad) = problem.eval(&theta);
        (f, grad.into_raw_vec_and_offset().0)
    }
}

/// Train with BFGS from `θ = 0`, `B = I`, stopping when `‖∇T'‖ < ε` or the
/// iteration cap is reached.
pub fn train_bfgs(dataset: &LdlDataset, config: &BfgsConfig) -> Result<TrainOutcome> {
    train_bfgs_observed(dataset, config, |_| {})
}

/// [`train_bfgs`] with a per-iteration observer. A failed line search resets
/// `B` to the identity and retries once; a second failure aborts.
pub fn train_bfgs_observed(
    dataset: &LdlDataset,
    config: &BfgsConfig,
    mut observer: impl FnMut(&BfgsStep<'_>),
) -> Result<TrainOutcome> {
    config.validate()?;
    let problem = Problem::from_dataset(dataset, config.l2)?;
    let c = dataset.c();
    let q = dataset.q();
    let m = c * (q + 1);
    let shape = (c, q + 1);
    let objective = flat_objective(&problem, shape);

    let start = Instant::now();
    let mut theta = vec![0.0f64; m];
    let mut b = Array2::<f64>::eye(m);
    let (mut f, mut grad) = objective(&theta);
    let mut trace = Vec::new();
    let mut status = ConvergenceStatus::MaxIterations;

    'outer: for iteration in 1..=config.max_iters {
        let grad_norm = norm(&grad);
        if grad_norm < config.epsilon {
            status = ConvergenceStatus::Converged;
            break;
        }

        let g_arr = Array1::from_vec(grad.clone());
        let mut direction: Vec<f64> = (-&b.dot(&g_arr)).to_vec();
        let mut reset_used = false;
        let outcome = loop {
            match strong_wolfe(
                &objective,
                &theta,
                f,
                &grad,
                &direction,
                config.c1,
                config.c2,
                config.max_line_search_steps,
            ) {
                Ok(out) => break out,
                Err(err) if !reset_used => {
                    log::warn!("line search failed at iteration {iteration} ({err}); resetting B to identity");
                    reset_used = true;
                    b = Array2::eye(m);
                    direction = grad.iter().map(|&g| -g).collect();
                }
                Err(err) => {
                    // The achievable decrease along steepest descent is
                    // slope²/(2·curvature), well below |slope| itself; once
                    // |slope| sits within a few decades of the objective's
                    // floating-point resolution the Wolfe tests are noise
                    // and no further progress is representable.
                    let slope: f64 = grad.iter().zip(&direction).map(|(&g, &d)| g * d).sum();
                    let resolution = 1e4 * f64::EPSILON * (1.0 + f.abs());
                    if -slope <= resolution {
                        log::warn!(
                            "stopping at iteration {iteration}: no representable descent \
                             (slope {slope:.3e}, resolution {resolution:.3e}, |grad| {grad_norm:.3e})"
                        );
                        status = ConvergenceStatus::Stalled;
                        break 'outer;
                    }
                    return Err(err);
                }
            }
        };

        let theta_new: Vec<f64> = theta
            .iter()
            .zip(&direction)
            .map(|(&t, &d)| t + outcome.alpha * d)
            .collect();
        let s: Vec<f64> = theta_new.iter().zip(&theta).map(|(&a, &b)| a - b).collect();
        let u: Vec<f64> = outcome
            .grad_new
            .iter()
            .zip(&grad)
            .map(|(&a, &b)| a - b)
            .collect();

        let s_arr = Array1::from_vec(s.clone());
        let u_arr = Array1::from_vec(u.clone());
        let updated = match bfgs_update(&b, &s_arr, &u_arr) {
            Ok(next) => {
                b = next;
                true
            }
            Err(err) => {
                log::warn!("skipping inverse-Hessian update at iteration {iteration}: {err}");
                false
            }
        };

        let new_grad_norm = norm(&outcome.grad_new);
        // Recover T from T' and the ridge term.
        let norm_sq: f64 = theta_new.iter().map(|v| v * v).sum();
        trace.push(TraceRecord {
            iteration,
            objective: config.l2 * norm_sq - outcome.f_new,
            grad_norm: new_grad_norm,
            step_length: outcome.alpha,
            millis: start.elapsed().as_secs_f64() * 1e3,
        });
        observer(&BfgsStep {
            iteration,
            theta_before: &theta,
            direction: &direction,
            alpha: outcome.alpha,
            s: &s,
            u: &u,
            b_after: updated.then_some(&b),
        });

        theta = theta_new;
        f = outcome.f_new;
        grad = outcome.grad_new;
    }
    if status == ConvergenceStatus::MaxIterations && norm(&grad) < config.epsilon {
        status = ConvergenceStatus::Converged;
    }

    let theta = Array2::from_shape_vec(shape, theta).expect("shape");
    let mut model = MaxEntModel::with_algorithm(theta, "sa-bfgs")?;
    model.set_meta(vec![
        ("epsilon".to_string(), format!("{}", config.epsilon)),
        ("iterations".to_string(), format!("{}", trace.len())),
        (
            "converged".to_string(),
            format!("{}", status == ConvergenceStatus::Converged),
        ),
    ]);
    Ok(TrainOutcome {
        model,
        trace,
        status,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
