//! Plug-in experiments: estimate the prior from samples, act optimally for
//! the estimate, and measure what that costs under the true prior.
//!
//! Every `(n, seed)` cell draws from its own stream `Rng::new(seed, n)`, so
//! rows do not depend on the order (or the thread) in which cells run.

use std::sync::Arc;

use rayon::prelude::*;

use crate::channels::{BayesModel, Channel};
use crate::error::{Error, Result};
use crate::families::{Family, Verdict};
use crate::measures::{
    bounded_lipschitz_distance, empirical_measure, sample, total_variation, wasserstein1, MixedMeasure, Rng,
};
use crate::single_stage::{
    evaluate_policy_for, optimal_cost_for, optimal_policy_for, CostFunction, Policy,
};

/// Grid cells of the bounded-Lipschitz surrogate.
pub const BL_MESH: usize = 256;
pub const MIN_SEEDS: usize = 3;

/// Which distance columns to compute; skipped columns are reported as NaN.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub bl: bool,
    pub tv: bool,
    pub w1: bool,
}

impl Default for Metrics {
    fn default() -> Self {
        Metrics {
            bl: true,
            tv: true,
            w1: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub true_prior: MixedMeasure,
    pub channel: Channel,
    pub cost: CostFunction,
    pub sample_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub metrics: Metrics,
}

impl ExperimentPlan {
    pub fn new(
        true_prior: MixedMeasure,
        channel: Channel,
        cost: CostFunction,
        sample_sizes: Vec<usize>,
        seeds: Vec<u64>,
    ) -> Result<Self> {
        let plan = ExperimentPlan {
            true_prior,
            channel,
            cost,
            sample_sizes,
            seeds,
            metrics: Metrics::default(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_sizes.is_empty() || self.sample_sizes[0] == 0 {
            return Err(Error::invalid("plan", "sample sizes must be positive"));
        }
        if self.sample_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("plan", "sample sizes must be strictly increasing"));
        }
        if self.seeds.len() < MIN_SEEDS {
            return Err(Error::invalid("plan", format!("need at least {MIN_SEEDS} seeds, got {}", self.seeds.len())));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("plan", "seeds must be distinct"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyRow {
    pub n: usize,
    pub seed: u64,
    /// `J*(P̂_n, Q)`
    pub j_star_empirical: f64,
    /// `J(P, Q, γ*_{P̂_n})`
    pub j_mismatch: f64,
    pub bl: f64,
    pub tv: f64,
    pub w1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyTable {
    /// `J*(P, Q)`
    pub j_star: f64,
    /// Sorted by `(n, seed)` in plan order.
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyTable {
    /// Median over seeds of `|J(P, Q, γ*_{P̂_n}) - J*(P, Q)|` at size `n`.
    pub fn median_mismatch_gap(&self, n: usize) -> Option<f64> {
        median(self.rows.iter().filter(|r| r.n == n).map(|r| (r.j_mismatch - self.j_star).abs()).collect())
    }

    /// Median over seeds of `|J*(P̂_n, Q) - J*(P, Q)|` at size `n`.
    pub fn median_cost_gap(&self, n: usize) -> Option<f64> {
        median(self.rows.iter().filter(|r| r.n == n).map(|r| (r.j_star_empirical - self.j_star).abs()).collect())
    }

    pub fn median_bl(&self, n: usize) -> Option<f64> {
        median(self.rows.iter().filter(|r| r.n == n).map(|r| r.bl).collect())
    }
}

pub fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

fn run_cell(plan: &ExperimentPlan, truth: &BayesModel, n: usize, seed: u64) -> Result<ConsistencyRow> {
    let mut rng = Rng::new(seed, n as u64);
    let draws = sample(&plan.true_prior, &mut rng, n)?;
    let p_hat = empirical_measure(&draws, plan.true_prior.domain())?;
    let model = Arc::new(BayesModel::new(p_hat.clone(), plan.channel.clone())?);
    let j_star_empirical = optimal_cost_for(&model, &plan.cost, 0);
    let policy = optimal_policy_for(model, &plan.cost);
    let j_mismatch = evaluate_policy_for(truth, &plan.cost, &policy)?;
    let m = plan.metrics;
    let p = &plan.true_prior;
    Ok(ConsistencyRow {
        n,
        seed,
        j_star_empirical,
        j_mismatch,
        bl: if m.bl { bounded_lipschitz_distance(&p_hat, p, BL_MESH)? } else { f64::NAN },
        tv: if m.tv { total_variation(&p_hat, p)? } else { f64::NAN },
        w1: if m.w1 { wasserstein1(&p_hat, p)? } else { f64::NAN },
    })
}

/// Runs every `(n, seed)` cell of the plan; `parallel` only changes speed.
pub fn run_consistency_experiment(plan: &ExperimentPlan, parallel: bool) -> Result<ConsistencyTable> {
    plan.validate()?;
    let truth = BayesModel::new(plan.true_prior.clone(), plan.channel.clone())?;
    let j_star = optimal_cost_for(&truth, &plan.cost, 0);
    let cells: Vec<(usize, u64)> = plan
        .sample_sizes
        .iter()
        .flat_map(|&n| plan.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let rows: Result<Vec<ConsistencyRow>> = if parallel {
        cells.par_iter().map(|&(n, s)| run_cell(plan, &truth, n, s)).collect()
    } else {
        cells.iter().map(|&(n, s)| run_cell(plan, &truth, n, s)).collect()
    };
    Ok(ConsistencyTable { j_star, rows: rows? })
}

/// Diagnostic for uniformity over a policy class, not a test of any
/// consistency statement: the largest `|J(P, Q, γ) - J(P̂, Q, γ)|` over the
/// clamped affine policies `γ(y) = a + b y` with `a`, `b` on a `k × k` grid in
/// `[-1, 1]²`.
pub fn affine_policy_deviation(
    p: &MixedMeasure,
    p_hat: &MixedMeasure,
    q: &Channel,
    c: &CostFunction,
    k: usize,
) -> Result<f64> {
    if k < 2 {
        return Err(Error::Argument("policy grid needs at least two points".into()));
    }
    let truth = BayesModel::new(p.clone(), q.clone())?;
    let estimate = BayesModel::new(p_hat.clone(), q.clone())?;
    let obs = truth.observation_domain().hull(&estimate.observation_domain());
    if !obs.is_bounded() {
        return Err(Error::Unsupported("policy diagnostic on an unbounded observation domain".into()));
    }
    let coef = |i: usize| -1.0 + 2.0 * i as f64 / (k - 1) as f64;
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (coef(i), coef(j));
            // clamping breaks linearity, so tabulate the clamped map finely
            let m = if obs.hi > obs.lo { 65 } else { 1 };
            let ys: Vec<f64> = (0..m).map(|t| obs.lo + (obs.hi - obs.lo) * t as f64 / (m.max(2) - 1) as f64).collect();
            let us = ys.iter().map(|&y| c.actions.clamp(a + b * y)).collect();
            let policy = Policy::grid(ys, us)?;
            let d = evaluate_policy_for(&truth, c, &policy)? - evaluate_policy_for(&estimate, c, &policy)?;
            worst = worst.max(d.abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialRow {
    pub family: Family,
    pub n: usize,
    /// `J*(P_n, Q)`
    pub j_n: f64,
    /// `J*(P, Q)`
    pub j_limit: f64,
    /// `J(P, Q, γ*_{P_n})`
    pub j_mismatch: f64,
    pub tv: f64,
    pub w1: f64,
    pub bl: f64,
    pub verdict: Verdict,
}

/// Evaluates a named sequence at each `n`.
pub fn adversarial_sequence_experiment(family: Family, ns: &[usize]) -> Result<Vec<AdversarialRow>> {
    ns.iter()
        .map(|&n| {
            let inst = family.instance(n)?;
            let limit = BayesModel::new(inst.p.clone(), inst.channel.clone())?;
            let member = Arc::new(BayesModel::new(inst.p_n.clone(), inst.channel.clone())?);
            let j_limit = optimal_cost_for(&limit, &inst.cost, 0);
            let j_n = optimal_cost_for(&member, &inst.cost, 0);
            let policy = optimal_policy_for(member, &inst.cost);
            let j_mismatch = evaluate_policy_for(&limit, &inst.cost, &policy)?;
            Ok(AdversarialRow {
                family,
                n,
                j_n,
                j_limit,
                j_mismatch,
                tv: total_variation(&inst.p_n, &inst.p)?,
                w1: wasserstein1(&inst.p_n, &inst.p)?,
                bl: bounded_lipschitz_distance(&inst.p_n, &inst.p, BL_MESH)?,
                verdict: family.verdict(),
            })
        })
        .collect()
}
