//! Strong-Wolfe line search over a generic objective, by bracketing and
//! zooming (Nocedal & Wright, Algorithms 3.5/3.6).

use crate::error::{LdlError, Result};

/// Accepted step and the objective/gradient already evaluated there, so the
/// caller can reuse them.
#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub f_new: f64,
    pub grad_new: Vec<f64>,
    pub evals: usize,
}

struct Probe<'f, F> {
    f: &'f F,
    x0: &'f [f64],
    dir: &'f [f64],
    evals: usize,
}

impl<'f, F> Probe<'f, F>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    /// Evaluate φ(α) = f(x0 + α·dir) and the directional derivative φ'(α).
    fn at(&mut self, alpha: f64) -> (f64, f64, Vec<f64>) {
        self.evals += 1;
        let point: Vec<f64> = self
            .x0
            .iter()
            .zip(self.dir)
            .map(|(&x, &d)| x + alpha * d)
            .collect();
        let (value, grad) = (self.f)(&point);
        let slope = grad.iter().zip(self.dir).map(|(&g, &d)| g * d).sum();
        (value, slope, grad)
    }
}

/// Find `α > 0` satisfying the strong Wolfe conditions
///
/// ```text
/// f(x + αp) ≤ f(x) + c1·α·∇f(x)ᵀp          (sufficient decrease)
/// |∇f(x + αp)ᵀp| ≤ c2·|∇f(x)ᵀp|            (curvature)
/// ```
///
/// `f0`/`g0` are the objective and gradient at `x0`, reused to avoid a
/// duplicate evaluation. Errors with [`LdlError::NotDescentDirection`] when
/// `∇f(x)ᵀp ≥ 0` and [`LdlError::LineSearchFailed`] when no point is found
/// within `max_steps` evaluations.
pub fn strong_wolfe<F>(
    f: &F,
    x0: &[f64],
    f0: f64,
    g0: &[f64],
    dir: &[f64],
    c1: f64,
    c2: f64,
    max_steps: usize,
) -> Result<LineSearchOutcome>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let slope0: f64 = g0.iter().zip(dir).map(|(&g, &d)| g * d).sum();
    if slope0 >= 0.0 || !slope0.is_finite() {
        return Err(LdlError::NotDescentDirection { slope: slope0 });
    }

    let mut probe = Probe { f, x0, dir, evals: 0 };
    let armijo = |alpha: f64, value: f64| value <= f0 + c1 * alpha * slope0;
    let curvature = |slope: f64| slope.abs() <= c2 * slope0.abs();

    // Bracketing phase: grow α until the minimizer is trapped.
    let mut alpha_prev = 0.0;
    let mut f_prev = f0;
    let mut alpha = 1.0;
    let mut bracket: Option<(f64, f64, f64)> = None; // (lo, f_lo, hi)
    while probe.evals < max_steps {
        let (value, slope, grad) = probe.at(alpha);
        if !value.is_finite() || !armijo(alpha, value) || (alpha_prev > 0.0 && value >= f_prev) {
            bracket = Some((alpha_prev, f_prev, alpha));
            break;
        }
        if curvature(slope) {
            return Ok(LineSearchOutcome {
                alpha,
                f_new: value,
                grad_new: grad,
                evals: probe.evals,
            });
        }
        if slope >= 0.0 {
            bracket = Some((alpha, value, alpha_prev));
            break;
        }
        alpha_prev = alpha;
        f_prev = value;
        alpha *= 2.0;
    }

    let (mut lo, mut f_lo, mut hi) = match bracket {
        Some(b) => b,
        None => return Err(LdlError::LineSearchFailed { steps: probe.evals }),
    };

    // Zoom phase: shrink [lo, hi] keeping the invariant that lo satisfies
    // sufficient decrease and the interval contains a Wolfe point.
    while probe.evals < max_steps {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-16 * (1.0 + lo.abs()) {
            break;
        }
        let (value, slope, grad) = probe.at(mid);
        if !value.is_finite() || !armijo(mid, value) || value >= f_lo {
            hi = mid;
        } else {
            if curvature(slope) {
                return Ok(LineSearchOutcome {
                    alpha: mid,
                    f_new: value,
                    grad_new: grad,
                    evals: probe.evals,
                });
            }
            if slope * (hi - lo) >= 0.0 {
                hi = lo;
            }
            lo = mid;
            f_lo = value;
        }
    }
    Err(LdlError::LineSearchFailed { steps: probe.evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(x: &[f64]) -> (f64, Vec<f64>) {
        let f = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        (f, x.to_vec())
    }

    #[test]
    fn newton_step_on_quadratic_accepted_at_one() {
        let x0 = vec![3.0, -4.0];
        let (f0, g0) = quadratic(&x0);
        let dir: Vec<f64> = x0.iter().map(|v| -v).collect();
        let out = strong_wolfe(&quadratic, &x0, f0, &g0, &dir, 1e-4, 0.9, 50).unwrap();
        assert_eq!(out.alpha, 1.0);
        assert!(out.f_new.abs() < 1e-20);
    }

    #[test]
    fn ascent_direction_rejected() {
        let x0 = vec![1.0, 2.0];
        let (f0, g0) = quadratic(&x0);
        let dir = x0.clone();
        assert!(matches!(
            strong_wolfe(&quadratic, &x0, f0, &g0, &dir, 1e-4, 0.9, 50),
            Err(LdlError::NotDescentDirection { .. })
        ));
    }

    #[test]
    fn wolfe_conditions_hold_at_returned_step() {
        // Non-quadratic convex objective with a short descent direction, so
        // bracketing has to expand and zoom.
        let f = |x: &[f64]| {
            let v = x[0];
            ((v - 3.0).powi(2) + (v - 3.0).abs().powf(1.5), vec![
                2.0 * (v - 3.0) + 1.5 * (v - 3.0).signum() * (v - 3.0).abs().sqrt(),
            ])
        };
        let x0 = vec![0.0];
        let (f0, g0) = f(&x0);
        let dir = vec![0.5];
        let (c1, c2) = (1e-4, 0.9);
        let out = strong_wolfe(&f, &x0, f0, &g0, &dir, c1, c2, 50).unwrap();
        let (f_new, g_new) = f(&[x0[0] + out.alpha * dir[0]]);
        let slope0 = g0[0] * dir[0];
        let slope_new = g_new[0] * dir[0];
        assert!(f_new <= f0 + c1 * out.alpha * slope0 + 1e-12);
        assert!(slope_new.abs() <= c2 * slope0.abs() + 1e-12);
        assert!((f_new - out.f_new).abs() < 1e-12);
    }

    #[test]
    fn tiny_budget_fails_cleanly() {
        // One evaluation cannot both bracket and zoom on this function.
        let f = |x: &[f64]| {
            let v = x[0];
            (v.powi(4) - v, vec![4.0 * v.powi(3) - 1.0])
        };
        let x0 = vec![-2.0];
        let (f0, g0) = f(&x0);
        let dir = vec![1e-3];
        let r = strong_wolfe(&f, &x0, f0, &g0, &dir, 1e-4, 0.9, 1);
        assert!(matches!(r, Err(LdlError::LineSearchFailed { .. })));
    }
}
