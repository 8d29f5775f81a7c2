//! Exact finite-horizon evaluation by enumerating observation histories.
//!
//! A node of the history tree carries the unnormalized law of the current
//! state jointly with the observations so far. Because a deterministic
//! history policy chooses each action separately at every history, the
//! optimum (or the maximal deviation) over all such policies decomposes into
//! a tree recursion with one choice of `u` per node.

use super::{Belief, FiniteModel};
use crate::error::{Error, Result};

/// Largest number of observation histories `|Y|^H` enumerated.
pub const HISTORY_BUDGET: usize = 1_000_000;
/// Largest policy tree `(|Y| |U|)^H` searched.
pub const POLICY_TREE_BUDGET: usize = 20_000_000;

/// Deterministic policy over observation histories, stored per stage and
/// indexed by the base-`|Y|` code of `(y_0, …, y_t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryPolicy {
    tables: Vec<Vec<usize>>,
}

impl HistoryPolicy {
    /// Tabulates `f(history)` for every history up to `horizon`.
    pub fn from_fn<F: Fn(&[usize]) -> usize>(model: &FiniteModel, horizon: usize, f: F) -> Result<Self> {
        let ny = model.n_observations();
        check_budget(ny, horizon, HISTORY_BUDGET, "observation histories")?;
        let mut tables = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let count = ny.pow(t as u32 + 1);
            let mut table = Vec::with_capacity(count);
            let mut hist = vec![0usize; t + 1];
            for code in 0..count {
                let mut c = code;
                for slot in hist.iter_mut().rev() {
                    *slot = c % ny;
                    c /= ny;
                }
                let u = f(&hist);
                if u >= model.n_actions() {
                    return Err(Error::Argument(format!("policy chose action {u} out of range")));
                }
                table.push(u);
            }
            tables.push(table);
        }
        Ok(HistoryPolicy { tables })
    }

    pub fn constant(model: &FiniteModel, horizon: usize, u: usize) -> Result<Self> {
        Self::from_fn(model, horizon, |_| u)
    }

    pub fn horizon(&self) -> usize {
        self.tables.len()
    }

    /// Action at stage `t` after the history with code `code`.
    pub fn action(&self, t: usize, code: usize) -> usize {
        self.tables[t][code]
    }
}

fn check_budget(base: usize, horizon: usize, budget: usize, what: &str) -> Result<()> {
    let mut n: usize = 1;
    for _ in 0..horizon {
        n = n.saturating_mul(base);
        if n > budget {
            return Err(Error::Capability(format!(
                "{base}^{horizon} {what} exceed the enumeration budget {budget}"
            )));
        }
    }
    Ok(())
}

fn check_prior(model: &FiniteModel, p: &Belief) -> Result<()> {
    if p.weights.len() != model.n_states() {
        return Err(Error::Argument("prior dimension does not match the model".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizonCost {
    /// `E[Σ_{t<H} β^t c(X_t, U_t)]`
    pub cost: f64,
    /// Total probability of the enumerated histories.
    pub leaf_mass: f64,
}

/// `law(x) · Qm(y|x)`
fn observe(model: &FiniteModel, pred: &[f64], y: usize) -> Vec<f64> {
    pred.iter().enumerate().map(|(x, &p)| p * model.qm[x][y]).collect()
}

fn stage_cost(model: &FiniteModel, a: &[f64], u: usize) -> f64 {
    a.iter().enumerate().map(|(x, &p)| p * model.c[x][u]).sum()
}

/// Exact discounted cost of `policy` over `horizon` stages from `prior`.
pub fn finite_horizon_cost(
    model: &FiniteModel,
    prior: &Belief,
    policy: &HistoryPolicy,
    horizon: usize,
) -> Result<HorizonCost> {
    check_prior(model, prior)?;
    check_budget(model.n_observations(), horizon, HISTORY_BUDGET, "observation histories")?;
    if policy.horizon() < horizon {
        return Err(Error::Argument("policy is shorter than the horizon".into()));
    }
    if horizon == 0 {
        return Ok(HorizonCost { cost: 0.0, leaf_mass: 1.0 });
    }
    let mut out = HorizonCost { cost: 0.0, leaf_mass: 0.0 };
    walk(model, policy, &prior.weights, 0, 0, horizon, 1.0, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    model: &FiniteModel,
    policy: &HistoryPolicy,
    pred: &[f64],
    t: usize,
    code: usize,
    horizon: usize,
    discount: f64,
    out: &mut HorizonCost,
) {
    let ny = model.n_observations();
    for y in 0..ny {
        let a = observe(model, pred, y);
        let code = code * ny + y;
        let u = policy.action(t, code);
        out.cost += discount * stage_cost(model, &a, u);
        if t + 1 == horizon {
            out.leaf_mass += a.iter().sum::<f64>();
        } else if a.iter().any(|&v| v != 0.0) {
            let next = model.predict(&a, u);
            walk(model, policy, &next, t + 1, code, horizon, discount * model.beta, out);
        }
    }
}

/// `min` (or `max`) over history policies of the discounted expected cost
/// under the (possibly signed) initial law `pred`.
fn solve(model: &FiniteModel, pred: &[f64], t: usize, horizon: usize, discount: f64, maximize: bool) -> f64 {
    if t == horizon || pred.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    (0..model.n_observations())
        .map(|y| {
            let a = observe(model, pred, y);
            best_action(model, &a, t, horizon, discount, maximize).1
        })
        .sum()
}

fn best_action(model: &FiniteModel, a: &[f64], t: usize, horizon: usize, discount: f64, maximize: bool) -> (usize, f64) {
    let mut best = (0, if maximize { f64::NEG_INFINITY } else { f64::INFINITY });
    for u in 0..model.n_actions() {
        let mut v = discount * stage_cost(model, a, u);
        if t + 1 < horizon {
            v += solve(model, &model.predict(a, u), t + 1, horizon, discount * model.beta, maximize);
        }
        let better = if maximize { v > best.1 } else { v < best.1 };
        if better {
            best = (u, v);
        }
    }
    best
}

fn extract(model: &FiniteModel, pred: &[f64], t: usize, code: usize, horizon: usize, discount: f64, tables: &mut [Vec<usize>]) {
    let ny = model.n_observations();
    for y in 0..ny {
        let a = observe(model, pred, y);
        let code = code * ny + y;
        let (u, _) = best_action(model, &a, t, horizon, discount, false);
        tables[t][code] = u;
        if t + 1 < horizon {
            extract(model, &model.predict(&a, u), t + 1, code, horizon, discount * model.beta, tables);
        }
    }
}

/// `J*_H(p)` over all deterministic history policies, with an optimal policy.
pub fn optimal_horizon_cost(model: &FiniteModel, prior: &Belief, horizon: usize) -> Result<(f64, HistoryPolicy)> {
    check_prior(model, prior)?;
    check_budget(
        model.n_observations() * model.n_actions(),
        horizon,
        POLICY_TREE_BUDGET,
        "policy tree nodes",
    )?;
    let value = solve(model, &prior.weights, 0, horizon, 1.0, false);
    let ny = model.n_observations();
    let mut tables: Vec<Vec<usize>> = (0..horizon).map(|t| vec![0; ny.pow(t as u32 + 1)]).collect();
    if horizon > 0 {
        extract(model, &prior.weights, 0, 0, horizon, 1.0, &mut tables);
    }
    Ok((value, HistoryPolicy { tables }))
}

/// `max_γ |J_H(p, γ) - J_H(p', γ)|` over deterministic history policies.
pub fn sup_policy_deviation(model: &FiniteModel, p: &Belief, p_prime: &Belief, horizon: usize) -> Result<f64> {
    check_prior(model, p)?;
    check_prior(model, p_prime)?;
    check_budget(
        model.n_observations() * model.n_actions(),
        horizon,
        POLICY_TREE_BUDGET,
        "policy tree nodes",
    )?;
    let sigma: Vec<f64> = p.weights.iter().zip(&p_prime.weights).map(|(a, b)| a - b).collect();
    let neg: Vec<f64> = sigma.iter().map(|v| -v).collect();
    let up = solve(model, &sigma, 0, horizon, 1.0, true);
    let down = solve(model, &neg, 0, horizon, 1.0, true);
    Ok(up.max(down).max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscountedBoundsReport {
    pub j_p: f64,
    pub j_p_prime: f64,
    pub tv: f64,
    /// `2 ‖c‖∞ β^H / (1 - β)`
    pub tail: f64,
    pub gap: f64,
    /// `TV ‖c‖∞ / (1 - β) + tail`
    pub continuity_bound: f64,
    /// `J_H(p, γ*_{p'}) - J*_H(p)`
    pub mismatch: f64,
    /// `2 TV ‖c‖∞ / (1 - β) + tail`
    pub mismatch_bound: f64,
    pub continuity_pass: bool,
    pub mismatch_pass: bool,
}

/// Horizon-`H` versions of the discounted continuity and mismatch bounds.
pub fn discounted_tv_bounds(
    model: &FiniteModel,
    p: &Belief,
    p_prime: &Belief,
    horizon: usize,
) -> Result<DiscountedBoundsReport> {
    let (j_p, _) = optimal_horizon_cost(model, p, horizon)?;
    let (j_p_prime, policy_prime) = optimal_horizon_cost(model, p_prime, horizon)?;
    let applied = finite_horizon_cost(model, p, &policy_prime, horizon)?.cost;
    let tv = p.tv(p_prime);
    let sup = model.cost_sup();
    let beta = model.beta;
    let tail = 2.0 * sup * beta.powi(horizon as i32) / (1.0 - beta);
    let gap = (j_p - j_p_prime).abs();
    let continuity_bound = tv * sup / (1.0 - beta) + tail;
    let mismatch = applied - j_p;
    let mismatch_bound = 2.0 * tv * sup / (1.0 - beta) + tail;
    Ok(DiscountedBoundsReport {
        j_p,
        j_p_prime,
        tv,
        tail,
        gap,
        continuity_bound,
        mismatch,
        mismatch_bound,
        continuity_pass: gap <= continuity_bound + 1e-9,
        mismatch_pass: mismatch >= -1e-9 && mismatch <= mismatch_bound + 1e-9,
    })
}
