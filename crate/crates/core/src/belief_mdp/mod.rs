//! Finite partially observed MDPs and their belief-state reduction.
//!
//! Timing: `X_0 ~ p`, `Y_t ~ Qm(·|X_t)`, `U_t = γ_t(Y_0, …, Y_t)`,
//! `X_{t+1} ~ T(·|X_t, U_t)`. The belief `z_t` is the law of `X_t` given
//! `Y_0, …, Y_t` (and past actions).

mod average;
mod horizon;
pub mod text;
mod vi;

pub use average::{average_cost_doubling_example, doubling_closed_form, doubling_running_average, DoublingReport};
pub use horizon::{
    discounted_tv_bounds, finite_horizon_cost, optimal_horizon_cost, sup_policy_deviation, DiscountedBoundsReport,
    HistoryPolicy, HorizonCost, HISTORY_BUDGET, POLICY_TREE_BUDGET,
};
pub use vi::{bellman, value_iteration, SimplexGrid, ValueTable};

use crate::error::{Error, Result};

/// Row-sum tolerance for stochastic matrices and beliefs.
pub const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteModel {
    pub states: Vec<f64>,
    pub actions: Vec<f64>,
    pub observations: Vec<f64>,
    /// `t[u][x][x'] = Pr(x' | x, u)`
    pub t: Vec<Vec<Vec<f64>>>,
    /// `qm[x][y] = Pr(y | x)`
    pub qm: Vec<Vec<f64>>,
    /// `c[x][u]`
    pub c: Vec<Vec<f64>>,
    pub beta: f64,
}

fn check_rows(rows: &[Vec<f64>], width: usize, what: &'static str) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::invalid(what, format!("row {i} has {} entries, expected {width}", r.len())));
        }
        if r.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::invalid(what, format!("row {i} has a negative entry")));
        }
        let s: f64 = r.iter().sum();
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::invalid(what, format!("row {i} sums to {s}")));
        }
    }
    Ok(())
}

impl FiniteModel {
    /// Validates shapes, stochasticity, `c ≥ 0` and `β ∈ (0, 1)`. Labels are
    /// `0, 1, …`.
    pub fn new(t: Vec<Vec<Vec<f64>>>, qm: Vec<Vec<f64>>, c: Vec<Vec<f64>>, beta: f64) -> Result<Self> {
        let nx = qm.len();
        let nu = t.len();
        if nx == 0 || nu == 0 {
            return Err(Error::invalid("model", "needs at least one state and one action"));
        }
        let ny = qm[0].len();
        if ny == 0 {
            return Err(Error::invalid("model", "needs at least one observation"));
        }
        for tu in &t {
            if tu.len() != nx {
                return Err(Error::invalid("model", "transition block has the wrong number of rows"));
            }
            check_rows(tu, nx, "transition kernel")?;
        }
        check_rows(&qm, ny, "observation channel")?;
        if c.len() != nx || c.iter().any(|r| r.len() != nu) {
            return Err(Error::invalid("model", "cost matrix must be states × actions"));
        }
        if c.iter().flatten().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("model", "costs must be finite and nonnegative"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid("model", format!("discount {beta} outside (0, 1)")));
        }
        let labels = |n: usize| (0..n).map(|i| i as f64).collect();
        Ok(FiniteModel {
            states: labels(nx),
            actions: labels(nu),
            observations: labels(ny),
            t,
            qm,
            c,
            beta,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn n_observations(&self) -> usize {
        self.observations.len()
    }

    /// `‖c‖∞`
    pub fn cost_sup(&self) -> f64 {
        self.c.iter().flatten().fold(0.0, |m, &v| m.max(v))
    }

    /// `Σ_x T(x'|x,u) z(x)`
    pub fn predict(&self, z: &[f64], u: usize) -> Vec<f64> {
        let n = self.n_states();
        let mut out = vec![0.0; n];
        for (x, &zx) in z.iter().enumerate() {
            if zx != 0.0 {
                for (xp, slot) in out.iter_mut().enumerate() {
                    *slot += self.t[u][x][xp] * zx;
                }
            }
        }
        out
    }
}

/// Probability vector over the states.
#[derive(Clone, Debug, PartialEq)]
pub struct Belief {
    weights: Vec<f64>,
}

impl Belief {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|&w| !(w >= 0.0)) || (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::invalid("belief", format!("weights {weights:?} are not a probability vector")));
        }
        Ok(Belief { weights })
    }

    pub fn point(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Belief { weights: w }
    }

    pub fn uniform(n: usize) -> Self {
        Belief {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `‖z - z'‖_TV = Σ |z(x) - z'(x)|`
    pub fn tv(&self, other: &Belief) -> f64 {
        self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).sum()
    }
}

fn check_dims(model: &FiniteModel, z: &Belief, u: usize) -> Result<()> {
    if z.weights.len() != model.n_states() {
        return Err(Error::Argument("belief dimension does not match the model".into()));
    }
    if u >= model.n_actions() {
        return Err(Error::Argument(format!("action index {u} out of range")));
    }
    Ok(())
}

/// `H(y | z, u) = Σ_{x'} Qm(y|x') Σ_x T(x'|x,u) z(x)`
pub fn observation_kernel(model: &FiniteModel, z: &Belief, u: usize) -> Result<Vec<f64>> {
    check_dims(model, z, u)?;
    let pred = model.predict(&z.weights, u);
    let mut h = vec![0.0; model.n_observations()];
    for (xp, &px) in pred.iter().enumerate() {
        for (y, slot) in h.iter_mut().enumerate() {
            *slot += model.qm[xp][y] * px;
        }
    }
    Ok(h)
}

/// `F(z, u, y)`: predict through `T`, then condition on `y`.
pub fn belief_update(model: &FiniteModel, z: &Belief, u: usize, y: usize) -> Result<Belief> {
    check_dims(model, z, u)?;
    if y >= model.n_observations() {
        return Err(Error::Argument(format!("observation index {y} out of range")));
    }
    let pred = model.predict(&z.weights, u);
    let mut w: Vec<f64> = pred.iter().enumerate().map(|(xp, &p)| model.qm[xp][y] * p).collect();
    let s: f64 = w.iter().sum();
    if !(s > 0.0) {
        return Err(Error::FilterDegeneracy { observation: y });
    }
    w.iter_mut().for_each(|v| *v /= s);
    Ok(Belief { weights: w })
}

/// Conditions a prior on the first observation `y_0` (no transition).
pub fn initial_belief(model: &FiniteModel, prior: &Belief, y: usize) -> Result<Belief> {
    let mut w: Vec<f64> = prior.weights.iter().enumerate().map(|(x, &p)| model.qm[x][y] * p).collect();
    let s: f64 = w.iter().sum();
    if !(s > 0.0) {
        return Err(Error::FilterDegeneracy { observation: y });
    }
    w.iter_mut().for_each(|v| *v /= s);
    Ok(Belief { weights: w })
}

/// `c̃(z, u) = Σ_x c(x, u) z(x)`
pub fn belief_cost(model: &FiniteModel, z: &Belief, u: usize) -> Result<f64> {
    check_dims(model, z, u)?;
    Ok(z.weights.iter().enumerate().map(|(x, &p)| model.c[x][u] * p).sum())
}
