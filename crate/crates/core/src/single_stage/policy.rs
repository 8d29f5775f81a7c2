//! Deterministic single-stage policies `y ↦ u`.

use std::sync::Arc;

use super::cost::CostFunction;
use crate::channels::BayesModel;
use crate::error::{Error, Result};
use crate::measures::Interval;

/// Golden-section stopping width.
pub const ARGMIN_TOL: f64 = 1e-10;
/// Default number of grid points for the Bayes argmin search.
pub const ARGMIN_GRID: usize = 1025;

/// Policies written down in closed form.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    Constant(f64),
    /// Optimal policy for the square-wave prior with `n` teeth under the
    /// half-identity, half-uniform channel and quadratic cost:
    /// `(1/3) m_n + (2/3) y` where the prior density is 2, `m_n` elsewhere,
    /// with `m_n = 1/2 - 1/(4n)` the prior mean.
    SquareWave { n: usize },
}

#[derive(Clone, Debug)]
pub enum Policy {
    ClosedForm(ClosedForm),
    /// Posterior mean, clamped to the action interval.
    PosteriorMean { model: Arc<BayesModel>, actions: Interval },
    /// Per-observation minimizer of the posterior expected cost.
    BayesArgmin {
        model: Arc<BayesModel>,
        cost: CostFunction,
        /// `0` for the exact slice minimizer, else the search grid size.
        grid: usize,
    },
    /// Linear interpolation of `(ys[i], us[i])`; undefined outside `[ys[0], ys[last]]`.
    GridInterpolated { ys: Vec<f64>, us: Vec<f64> },
}

impl Policy {
    pub fn grid(ys: Vec<f64>, us: Vec<f64>) -> Result<Policy> {
        if ys.is_empty() || ys.len() != us.len() || ys.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("policy", "grid must be strictly increasing and match its values"));
        }
        Ok(Policy::GridInterpolated { ys, us })
    }

    /// Action at observation `y`.
    pub fn action(&self, y: f64) -> Result<f64> {
        match self {
            Policy::ClosedForm(ClosedForm::Constant(u)) => Ok(*u),
            Policy::ClosedForm(ClosedForm::SquareWave { n }) => {
                let nf = *n as f64;
                let mean = 0.5 - 1.0 / (4.0 * nf);
                // density-2 cells are [2k/(2n), (2k+1)/(2n))
                let cell = (y * 2.0 * nf).floor();
                if (0.0..1.0).contains(&y) && cell as i64 % 2 == 0 {
                    Ok(mean / 3.0 + 2.0 * y / 3.0)
                } else {
                    Ok(mean)
                }
            }
            Policy::PosteriorMean { model, actions } => Ok(actions.clamp(model.posterior_mean(y))),
            Policy::BayesArgmin { model, cost, grid } => {
                let slice = model.slice(y);
                let slice = if slice.mass() > 0.0 { slice } else { model.prior().clone() };
                let stats = cost.stats(&slice);
                if *grid > 0 {
                    Ok(argmin(|u| cost.expected(&stats, u), cost.actions, *grid).0)
                } else {
                    Ok(cost.minimize(&stats).0)
                }
            }
            Policy::GridInterpolated { ys, us } => {
                let (lo, hi) = (ys[0], ys[ys.len() - 1]);
                if !(y >= lo && y <= hi) {
                    return Err(Error::Argument(format!("policy grid [{lo}, {hi}] does not cover y = {y}")));
                }
                let i = ys.partition_point(|&v| v <= y).saturating_sub(1).min(ys.len().saturating_sub(2));
                if ys.len() == 1 {
                    return Ok(us[0]);
                }
                let t = (y - ys[i]) / (ys[i + 1] - ys[i]);
                Ok(us[i] + t * (us[i + 1] - us[i]))
            }
        }
    }

    /// Points where the policy may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Policy::ClosedForm(ClosedForm::Constant(_)) => Vec::new(),
            Policy::ClosedForm(ClosedForm::SquareWave { n }) => {
                (0..=2 * n).map(|k| k as f64 / (2 * n) as f64).collect()
            }
            Policy::PosteriorMean { model, .. } | Policy::BayesArgmin { model, .. } => {
                model.density_breakpoints().to_vec()
            }
            Policy::GridInterpolated { ys, .. } => ys.clone(),
        }
    }
}

/// Minimizes `f` over `actions`: best of `grid` equally spaced points, then
/// golden-section search on the bracketing cells. Ties go to the smaller `u`.
pub fn argmin<F: Fn(f64) -> f64>(f: F, actions: Interval, grid: usize) -> (f64, f64) {
    let (a, b) = (actions.lo, actions.hi);
    if b <= a || grid < 2 {
        return (a, f(a));
    }
    let step = (b - a) / (grid - 1) as f64;
    let point = |i: usize| if i + 1 == grid { b } else { a + step * i as f64 };
    let mut best = (0, f(a));
    for i in 1..grid {
        let v = f(point(i));
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = point(best.0.saturating_sub(1));
    let hi = point((best.0 + 1).min(grid - 1));
    let (u, v) = golden(&f, lo, hi);
    let grid_u = point(best.0);
    if v < best.1 {
        (u, v)
    } else {
        (grid_u, best.1)
    }
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > ARGMIN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let u = 0.5 * (lo + hi);
    (u, f(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_finds_parabola_vertex() {
        let (u, v) = argmin(|u| (u - 0.123456789).powi(2), Interval::unit(), ARGMIN_GRID);
        assert!((u - 0.123456789).abs() < 1e-9);
        assert!(v < 1e-18);
        let (u, _) = argmin(|u| -u, Interval::unit(), ARGMIN_GRID);
        assert_eq!(u, 1.0);
    }

    #[test]
    fn argmin_tie_goes_low() {
        let (u, _) = argmin(|_| 1.0, Interval::new(-1.0, 1.0).unwrap(), 9);
        assert_eq!(u, -1.0);
    }

    #[test]
    fn grid_policy_is_undefined_outside() {
        let p = Policy::grid(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(p.action(0.25).unwrap(), 0.5);
        assert!(p.action(1.5).is_err());
    }
}
