//! Newton iteration with backtracking in the two fiber charts.
//!
//! Amoeba fibers fix `q` and solve for the `2n` arguments `theta`. Coamoeba
//! fibers fix `theta mod pi` and solve along the orbit `z = t * exp(i p)`
//! with `t` real and nonzero; the sign pattern of `t` selects the sector
//! `theta = p + pi*sigma`, and the polynomial dependence on `t` keeps the
//! iteration well conditioned (one exact step for linear systems).

use nalgebra::{DMatrix, DVector};

use crate::laurent::{LogPolarPoint, PolySystem};

use super::SolverConfig;

const STEP_TOL: f64 = 1e-12;

/// Starts whose scaled residual is still above this after
/// [`ABANDON_ITERS`] iterations are abandoned; a start that is going to
/// converge is deep into its quadratic phase well before that.
const ABANDON_RESIDUAL: f64 = 1e-2;
const ABANDON_ITERS: usize = 16;

#[derive(Clone, Copy)]
pub(crate) enum Chart<'a> {
    /// Unknowns are the arguments; `q` is fixed.
    AmoebaTheta { q: &'a [f64] },
    /// Unknowns are signed radii `t`; arguments are `p` plus `pi` where
    /// `t < 0`.
    CoamoebaRadial { p: &'a [f64] },
}

impl<'a> Chart<'a> {
    pub(crate) fn point(&self, x: &[f64]) -> Option<LogPolarPoint> {
        match self {
            Chart::AmoebaTheta { q } => LogPolarPoint::new(q.to_vec(), x.to_vec()).ok(),
            Chart::CoamoebaRadial { p } => {
                let mut qv = Vec::with_capacity(x.len());
                let mut theta = Vec::with_capacity(x.len());
                for (t, &pk) in x.iter().zip(*p) {
                    if *t == 0.0 || !t.is_finite() {
                        return None;
                    }
                    qv.push(t.abs().ln());
                    theta.push(pk + if *t < 0.0 { std::f64::consts::PI } else { 0.0 });
                }
                LogPolarPoint::new(qv, theta).ok()
            }
        }
    }

    fn diverged(&self, x: &[f64], cfg: &SolverConfig) -> bool {
        match self {
            Chart::AmoebaTheta { .. } => x.iter().any(|t| !t.is_finite() || t.abs() > 1e4),
            Chart::CoamoebaRadial { .. } => x
                .iter()
                .any(|t| !t.is_finite() || *t == 0.0 || t.abs().ln().abs() > cfg.search_box + 4.0),
        }
    }
}

/// One full evaluation: scaled residual, scaled real Jacobian of the chart
/// equations, and the scaled right-hand side.
fn assemble(
    sys: &PolySystem,
    chart: &Chart,
    x: &[f64],
) -> Option<(f64, DMatrix<f64>, DVector<f64>)> {
    let z = chart.point(x)?;
    let (values, jac_w) = sys.eval_with_jacobian_w(&z).ok()?;
    let n = sys.n();
    let dim = sys.num_vars();
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    let mut residual: f64 = 0.0;
    for j in 0..n {
        let scale = sys.polys()[j]
            .term_magnitude_sum(z.q())
            .max(f64::MIN_POSITIVE);
        let v = values[j] / scale;
        residual = residual.max(v.norm());
        rhs[2 * j] = v.re;
        rhs[2 * j + 1] = v.im;
        for k in 0..dim {
            let g = jac_w[(j, k)] / scale;
            match chart {
                Chart::AmoebaTheta { .. } => {
                    // d/d theta_k multiplies the gradient by i
                    jac[(2 * j, k)] = -g.im;
                    jac[(2 * j + 1, k)] = g.re;
                }
                Chart::CoamoebaRadial { .. } => {
                    // d/d t_k divides the gradient by t_k
                    jac[(2 * j, k)] = g.re / x[k];
                    jac[(2 * j + 1, k)] = g.im / x[k];
                }
            }
        }
    }
    Some((residual, jac, rhs))
}

fn residual_at(sys: &PolySystem, chart: &Chart, x: &[f64]) -> Option<f64> {
    let z = chart.point(x)?;
    sys.scaled_residual(&z).ok()
}

/// Run Newton from `x0`; `Some(x)` when converged to the residual and step
/// tolerances inside the chart bounds. Steps backtrack until the scaled
/// residual decreases, which keeps far-field iterates from overshooting the
/// narrow basins along tentacle directions; near a solution the full step
/// always wins and quadratic convergence is untouched.
pub(crate) fn newton_run(
    sys: &PolySystem,
    chart: &Chart,
    mut x: Vec<f64>,
    cfg: &SolverConfig,
) -> Option<Vec<f64>> {
    for iter in 0..cfg.max_iters {
        let (residual, jac, rhs) = assemble(sys, chart, &x)?;
        if iter >= ABANDON_ITERS && residual > ABANDON_RESIDUAL {
            return None;
        }
        // least-squares fallback keeps iterating toward non-isolated
        // solution sets (degenerate fibers), which classification then
        // flags as non-regular
        let step = match jac.clone().lu().solve(&(-&rhs)) {
            Some(s) => s,
            None => jac.svd(true, true).solve(&(-rhs), 1e-12).ok()?,
        };

        let mut scale = 1.0;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        for _ in 0..7 {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi + scale * si)
                .collect();
            if let Some(trial_res) = residual_at(sys, chart, &trial) {
                // anything below the acceptance tolerance is a solution;
                // never reject it for failing to strictly decrease at the
                // floating noise floor
                if trial_res < residual || trial_res < cfg.tol {
                    accepted = Some((trial, trial_res));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((trial, _)) = accepted else {
            // stuck at a nonzero local minimum of the residual
            return None;
        };
        x = trial;
        if chart.diverged(&x, cfg) {
            return None;
        }
        let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if scale * step.norm() < STEP_TOL * (1.0 + norm_x) {
            let z = chart.point(&x)?;
            let residual = sys.scaled_residual(&z).ok()?;
            return (residual < cfg.tol).then_some(x);
        }
    }
    None
}
