//! Discounted value iteration on a uniform grid over the belief simplex.
//!
//! Grid points are `k / r` for compositions `k` of the resolution `r` into
//! `|X|` parts. Filtered beliefs are projected to a nearby grid point by
//! largest-remainder rounding (ties to the lower state index), so the
//! projected operator is a `β`-contraction on grid functions.

use std::collections::HashMap;

use super::{belief_update, observation_kernel, Belief, FiniteModel};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct SimplexGrid {
    resolution: u32,
    points: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl SimplexGrid {
    pub fn new(n_states: usize, resolution: u32) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::Argument(format!("simplex resolution {resolution} is below 2")));
        }
        if n_states == 0 {
            return Err(Error::Argument("simplex over zero states".into()));
        }
        let mut points = Vec::new();
        let mut current = vec![0u32; n_states];
        compositions(resolution, 0, &mut current, &mut points);
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Ok(SimplexGrid {
            resolution,
            points,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn belief(&self, i: usize) -> Belief {
        let r = self.resolution as f64;
        Belief {
            weights: self.points[i].iter().map(|&k| k as f64 / r).collect(),
        }
    }

    /// Index of the grid point nearest to `z` under largest-remainder rounding.
    pub fn project(&self, z: &Belief) -> usize {
        let r = self.resolution as f64;
        let scaled: Vec<f64> = z.weights.iter().map(|w| w * r).collect();
        let mut k: Vec<u32> = scaled.iter().map(|s| s.floor().max(0.0) as u32).collect();
        let used: u32 = k.iter().sum();
        let mut remaining = self.resolution.saturating_sub(used) as usize;
        let mut order: Vec<usize> = (0..k.len()).collect();
        // stable sort keeps the lower index first among equal remainders
        order.sort_by(|&a, &b| (scaled[b] - scaled[b].floor()).total_cmp(&(scaled[a] - scaled[a].floor())));
        for &i in &order {
            if remaining == 0 {
                break;
            }
            k[i] += 1;
            remaining -= 1;
        }
        // rounding noise can leave the floors summing above r
        let mut excess = k.iter().sum::<u32>().saturating_sub(self.resolution);
        for i in order.iter().rev() {
            while excess > 0 && k[*i] > 0 {
                k[*i] -= 1;
                excess -= 1;
            }
        }
        self.index[&k]
    }
}

fn compositions(left: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = left;
        out.push(current.clone());
        return;
    }
    for k in (0..=left).rev() {
        current[pos] = k;
        compositions(left - k, pos + 1, current, out);
    }
}

/// Per grid point and action: stage cost and projected successors.
struct Transitions {
    cost: Vec<Vec<f64>>,
    next: Vec<Vec<Vec<(f64, usize)>>>,
}

impl Transitions {
    fn build(model: &FiniteModel, grid: &SimplexGrid) -> Result<Self> {
        let nu = model.n_actions();
        let mut cost = Vec::with_capacity(grid.len());
        let mut next = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let z = grid.belief(i);
            let mut ci = Vec::with_capacity(nu);
            let mut ni = Vec::with_capacity(nu);
            for u in 0..nu {
                ci.push(super::belief_cost(model, &z, u)?);
                let h = observation_kernel(model, &z, u)?;
                let mut succ = Vec::new();
                for (y, &hy) in h.iter().enumerate() {
                    if hy > 0.0 {
                        succ.push((hy, grid.project(&belief_update(model, &z, u, y)?)));
                    }
                }
                ni.push(succ);
            }
            cost.push(ci);
            next.push(ni);
        }
        Ok(Transitions { cost, next })
    }

    fn apply(&self, beta: f64, v: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let mut out = Vec::with_capacity(v.len());
        let mut policy = Vec::with_capacity(v.len());
        for (ci, ni) in self.cost.iter().zip(&self.next) {
            let mut best = (f64::INFINITY, 0);
            for (u, (&c, succ)) in ci.iter().zip(ni).enumerate() {
                let q = c + beta * succ.iter().map(|&(h, j)| h * v[j]).sum::<f64>();
                if q < best.0 {
                    best = (q, u);
                }
            }
            out.push(best.0);
            policy.push(best.1);
        }
        (out, policy)
    }
}

/// One application of the projected Bellman operator; returns `(Tv, greedy)`.
pub fn bellman(model: &FiniteModel, grid: &SimplexGrid, v: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    if v.len() != grid.len() {
        return Err(Error::Argument("value table does not match the grid".into()));
    }
    Ok(Transitions::build(model, grid)?.apply(model.beta, v))
}

#[derive(Clone, Debug)]
pub struct ValueTable {
    pub grid: SimplexGrid,
    pub values: Vec<f64>,
    pub policy: Vec<usize>,
    /// `‖v_{k+1} - v_k‖∞` for every sweep.
    pub residuals: Vec<f64>,
    /// Stopping threshold `tol (1 - β) / (2β)`.
    pub threshold: f64,
}

impl ValueTable {
    /// Value at the grid point nearest to `z`.
    pub fn value_at(&self, z: &Belief) -> f64 {
        self.values[self.grid.project(z)]
    }

    pub fn action_at(&self, z: &Belief) -> usize {
        self.policy[self.grid.project(z)]
    }
}

/// Iterates the projected Bellman operator from `v = 0` until the sup-norm
/// residual falls to `tol (1 - β) / (2β)`.
pub fn value_iteration(model: &FiniteModel, resolution: u32, tol: f64) -> Result<ValueTable> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance {tol} must be positive")));
    }
    let grid = SimplexGrid::new(model.n_states(), resolution)?;
    let tr = Transitions::build(model, &grid)?;
    let beta = model.beta;
    let threshold = tol * (1.0 - beta) / (2.0 * beta);
    let mut v = vec![0.0; grid.len()];
    let mut residuals = Vec::new();
    loop {
        let (next, policy) = tr.apply(beta, &v);
        let r = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        residuals.push(r);
        v = next;
        if r <= threshold || residuals.len() >= MAX_ITERATIONS {
            return Ok(ValueTable {
                grid,
                values: v,
                policy,
                residuals,
                threshold,
            });
        }
    }
}
