//! Single-stage Bayes control: `J*(P, Q) = inf_γ E[c(X, γ(Y))]`, the cost of a
//! given policy, and checkers for the continuity and mismatch inequalities.
//!
//! Costs are integrated against the observation marginal in two parts.
//! Observations with positive probability are summed exactly from their
//! slices. The density part is integrated over `y` by adaptive Gauss–Legendre
//! quadrature between the breakpoints of the model (and of the policy), where
//! the integrand is smooth.

pub mod cost;
pub mod policy;
pub mod quadrature;

use std::sync::Arc;

pub use cost::{CostFunction, CostKind, SliceStats};
pub use policy::{argmin, ClosedForm, Policy, ARGMIN_GRID, ARGMIN_TOL};

use crate::channels::{BayesModel, Channel};
use crate::error::{Error, Result};
use crate::measures::{sort_dedup, total_variation, wasserstein1, MixedMeasure};

/// Absolute tolerance of the density-part quadrature.
pub const QUAD_TOL: f64 = 1e-11;
/// Slack on every checked inequality.
pub const BOUND_SLACK: f64 = 1e-9;
/// Prior indices at which [`usc_sequence_check`] evaluates the sequence.
pub const USC_TAIL: [usize; 3] = [10, 100, 1000];
/// Slack of the upper semicontinuity check.
pub const USC_SLACK: f64 = 1e-6;

fn check_actions(c: &CostFunction) -> Result<()> {
    if !(c.actions.hi >= c.actions.lo) || !c.actions.is_bounded() {
        return Err(Error::Argument("action interval must be compact and nonempty".into()));
    }
    Ok(())
}

/// Optimal observation-to-action map for prior `p`.
pub fn optimal_policy(p: &MixedMeasure, q: &Channel, c: &CostFunction) -> Result<Policy> {
    check_actions(c)?;
    let model = Arc::new(BayesModel::new(p.clone(), q.clone())?);
    Ok(optimal_policy_for(model, c))
}

/// [`optimal_policy`] for a prebuilt model.
pub fn optimal_policy_for(model: Arc<BayesModel>, c: &CostFunction) -> Policy {
    if c.is_quadratic() {
        Policy::PosteriorMean {
            model,
            actions: c.actions,
        }
    } else {
        Policy::BayesArgmin {
            model,
            cost: c.clone(),
            grid: 0,
        }
    }
}

/// `J*(p, Q)`.
pub fn optimal_cost(p: &MixedMeasure, q: &Channel, c: &CostFunction) -> Result<f64> {
    check_actions(c)?;
    let model = BayesModel::new(p.clone(), q.clone())?;
    Ok(optimal_cost_for(&model, c, 0))
}

/// Minimal posterior risk (unnormalized) of a slice. `grid > 0` runs the
/// generic grid and golden-section search instead of the exact minimizer.
fn slice_minimum(stats: &SliceStats, c: &CostFunction, grid: usize) -> f64 {
    if let SliceStats::Moments([m0, ..]) = stats {
        if *m0 <= 0.0 {
            return 0.0;
        }
    }
    let v = if grid > 0 {
        argmin(|u| c.expected(stats, u), c.actions, grid).1
    } else {
        c.minimize(stats).1
    };
    v.max(0.0)
}

fn density_stats(model: &BayesModel, c: &CostFunction, y: f64) -> SliceStats {
    if c.is_quadratic() {
        SliceStats::Moments(model.density_moments(y))
    } else {
        c.stats(&model.density_slice(y))
    }
}

/// `J*` for a prebuilt model. `grid = 0` uses exact slice minimizers,
/// otherwise a grid of that size plus golden-section refinement.
pub fn optimal_cost_for(model: &BayesModel, c: &CostFunction, grid: usize) -> f64 {
    let atomic: f64 = model
        .atomic_observations()
        .iter()
        .map(|(_, s)| slice_minimum(&c.stats(s), c, grid))
        .sum();
    if !model.has_density_part() {
        return atomic;
    }
    let density = quadrature::integrate_piecewise(
        |y| slice_minimum(&density_stats(model, c, y), c, grid),
        model.density_breakpoints(),
        QUAD_TOL,
    );
    atomic + density
}

/// `J(p, Q, γ)`.
pub fn evaluate_policy(p: &MixedMeasure, q: &Channel, c: &CostFunction, policy: &Policy) -> Result<f64> {
    let model = BayesModel::new(p.clone(), q.clone())?;
    evaluate_policy_for(&model, c, policy)
}

/// [`evaluate_policy`] for a prebuilt model.
pub fn evaluate_policy_for(model: &BayesModel, c: &CostFunction, policy: &Policy) -> Result<f64> {
    let mut atomic = 0.0;
    for (y, s) in model.atomic_observations() {
        let u = policy.action(*y)?;
        atomic += c.expected(&c.stats(s), u);
    }
    if !model.has_density_part() {
        return Ok(atomic);
    }
    let obs = model.observation_domain();
    let mut breaks = model.density_breakpoints().to_vec();
    breaks.extend(policy.breakpoints().into_iter().filter(|&b| b > obs.lo && b < obs.hi));
    sort_dedup(&mut breaks);
    let mut failure = None;
    let density = quadrature::integrate_piecewise(
        |y| {
            let stats = density_stats(model, c, y);
            let mass = match &stats {
                SliceStats::Moments([m0, ..]) => *m0,
                _ => model.density_moments(y)[0],
            };
            if mass <= 0.0 {
                return 0.0;
            }
            match policy.action(y) {
                Ok(u) => c.expected(&stats, u),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks,
        QUAD_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(atomic + density),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TvContinuityReport {
    pub j_p: f64,
    pub j_p_prime: f64,
    pub gap: f64,
    pub tv: f64,
    /// `‖c‖∞ · TV`
    pub bound: f64,
    pub pass: bool,
}

/// Checks `|J*(p) - J*(p')| ≤ ‖c‖∞ ‖p - p'‖_TV`.
pub fn tv_continuity_gap(
    p: &MixedMeasure,
    p_prime: &MixedMeasure,
    q: &Channel,
    c: &CostFunction,
) -> Result<TvContinuityReport> {
    let tv = total_variation(p, p_prime)?;
    let j_p = optimal_cost(p, q, c)?;
    let j_p_prime = optimal_cost(p_prime, q, c)?;
    let gap = (j_p - j_p_prime).abs();
    let bound = c.sup_norm * tv;
    Ok(TvContinuityReport {
        j_p,
        j_p_prime,
        gap,
        tv,
        bound,
        pass: gap <= bound + BOUND_SLACK,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MismatchReport {
    /// `J*(p)`
    pub j_star: f64,
    /// `J(p, Q, γ*_{p̃})`
    pub j_mismatch: f64,
    pub gap: f64,
    pub tv: f64,
    /// `2 ‖c‖∞ · TV`
    pub bound: f64,
    pub pass: bool,
}

/// Checks `0 ≤ J(p, Q, γ*_{p̃}) - J*(p) ≤ 2 ‖c‖∞ ‖p - p̃‖_TV`.
pub fn mismatch_tv_bound(
    p: &MixedMeasure,
    p_tilde: &MixedMeasure,
    q: &Channel,
    c: &CostFunction,
) -> Result<MismatchReport> {
    let tv = total_variation(p, p_tilde)?;
    let model = BayesModel::new(p.clone(), q.clone())?;
    let j_star = optimal_cost_for(&model, c, 0);
    let wrong = optimal_policy(p_tilde, q, c)?;
    let j_mismatch = evaluate_policy_for(&model, c, &wrong)?;
    let gap = j_mismatch - j_star;
    let bound = 2.0 * c.sup_norm * tv;
    Ok(MismatchReport {
        j_star,
        j_mismatch,
        gap,
        tv,
        bound,
        pass: gap >= -BOUND_SLACK && gap <= bound + BOUND_SLACK,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WassersteinReport {
    pub j_p: f64,
    pub j_p_prime: f64,
    pub gap: f64,
    pub w1: f64,
    pub alpha: f64,
    /// Whether `alpha` came from [`estimate_alpha`] rather than the caller.
    pub alpha_estimated: bool,
    pub bound: f64,
    pub pass: bool,
}

/// Grid sizes `(x, y, u)` of the Lipschitz estimator.
pub const ALPHA_GRID: (usize, usize, usize) = (256, 256, 33);

/// Largest finite-difference quotient in `x` of `c(x, u) f(x, y)`, where `f`
/// is the channel density relative to the uniform law on the output domain.
pub fn estimate_alpha(q: &Channel, c: &CostFunction, grid: (usize, usize, usize)) -> Result<f64> {
    if !q.has_density() {
        return Err(Error::Capability("channel has atomic components, so no density representation exists".into()));
    }
    let xd = q.input_domain();
    let yd = q.output_domain();
    if !xd.is_bounded() || !yd.is_bounded() {
        return Err(Error::Unsupported("Lipschitz estimate on an unbounded domain".into()));
    }
    let (nx, ny, nu) = grid;
    let pts = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n < 2 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let xs = pts(xd.lo, xd.hi, nx);
    let ys = pts(yd.lo, yd.hi, ny);
    let us = pts(c.actions.lo, c.actions.hi, nu);
    let scale = yd.length();
    let mut alpha: f64 = 0.0;
    for &u in &us {
        for &y in &ys {
            let mut prev: Option<(f64, f64)> = None;
            for &x in &xs {
                let v = c.eval(x, u) * scale * q.density(x, y);
                if let Some((px, pv)) = prev {
                    alpha = alpha.max((v - pv).abs() / (x - px));
                }
                prev = Some((x, v));
            }
        }
    }
    Ok(alpha)
}

/// Checks `|J*(p) - J*(p')| ≤ α W1(p, p')`; `alpha = None` estimates `α`.
pub fn wasserstein_bound(
    p: &MixedMeasure,
    p_prime: &MixedMeasure,
    q: &Channel,
    c: &CostFunction,
    alpha: Option<f64>,
) -> Result<WassersteinReport> {
    if !q.has_density() {
        return Err(Error::Capability("channel has atomic components, so no density representation exists".into()));
    }
    let (alpha, alpha_estimated) = match alpha {
        Some(a) => (a, false),
        None => (estimate_alpha(q, c, ALPHA_GRID)?, true),
    };
    let w1 = wasserstein1(p, p_prime)?;
    let j_p = optimal_cost(p, q, c)?;
    let j_p_prime = optimal_cost(p_prime, q, c)?;
    let gap = (j_p - j_p_prime).abs();
    let bound = alpha * w1;
    Ok(WassersteinReport {
        j_p,
        j_p_prime,
        gap,
        w1,
        alpha,
        alpha_estimated,
        bound,
        pass: gap <= bound + BOUND_SLACK,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UscReport {
    pub limit_cost: f64,
    pub tail: Vec<(usize, f64)>,
    pub max_tail: f64,
    pub pass: bool,
}

/// Checks `max_{n ∈ USC_TAIL} J*(p_n) ≤ J*(p) + 1e-6`.
pub fn usc_sequence_check<F>(sequence: F, limit: &MixedMeasure, q: &Channel, c: &CostFunction) -> Result<UscReport>
where
    F: Fn(usize) -> Result<MixedMeasure>,
{
    let limit_cost = optimal_cost(limit, q, c)?;
    let tail = USC_TAIL
        .iter()
        .map(|&n| Ok((n, optimal_cost(&sequence(n)?, q, c)?)))
        .collect::<Result<Vec<_>>>()?;
    let max_tail = tail.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(UscReport {
        limit_cost,
        tail,
        max_tail,
        pass: max_tail <= limit_cost + USC_SLACK,
    })
}
