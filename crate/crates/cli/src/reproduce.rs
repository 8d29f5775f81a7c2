//! Named example pipelines with their targets.

use priorlab::belief_mdp::{
    average_cost_doubling_example, discounted_tv_bounds, doubling_running_average, sup_policy_deviation, Belief,
    FiniteModel,
};
use priorlab::channels::{Channel, ChannelKind, NoiseDensity};
use priorlab::empirical_lab::BL_MESH;
use priorlab::families::Family;
use priorlab::measures::{bounded_lipschitz_distance, total_variation, Interval, MixedMeasure};
use priorlab::single_stage::{
    estimate_alpha, evaluate_policy, optimal_cost, optimal_policy, wasserstein_bound, CostFunction, ALPHA_GRID,
};

use crate::error::{CliError, Result};
use crate::report::{CheckRow, Provenance};

pub const EXAMPLES: [(&str, &str); 8] = [
    ("erasure", "half-erasure channel, weak convergence without continuity"),
    ("quantizer", "two-cell quantizer with an atom sliding onto the boundary"),
    ("noninformative", "state-independent channel, escaping outer atoms"),
    ("setwise", "square-wave priors converging setwise to the uniform law"),
    ("mismatch_setwise", "cost of the square-wave policy applied under the uniform prior"),
    ("wasserstein_additive", "W1 bound for an additive triangular-noise channel"),
    ("avg_cost_doubling", "average cost along the doubling map"),
    ("discounted_bounds", "discounted TV bounds on a two-state model"),
];

pub fn default_ns(id: &str) -> Vec<usize> {
    match id {
        "erasure" => vec![2, 10, 100, 1000],
        "quantizer" => vec![2, 10, 100],
        "noninformative" => vec![10, 100, 1000],
        "setwise" | "mismatch_setwise" => vec![1, 2, 5, 10, 50],
        "wasserstein_additive" => (1..=10).collect(),
        "avg_cost_doubling" => vec![16],
        "discounted_bounds" => vec![8],
        _ => Vec::new(),
    }
}

/// Runs example `id` at `ns` (the example's defaults when empty). `tol`
/// replaces the default tolerance of every asserted comparison.
pub fn reproduce(id: &str, ns: &[usize], tol: Option<f64>) -> Result<Vec<CheckRow>> {
    let ns = if ns.is_empty() { default_ns(id) } else { ns.to_vec() };
    let t = |default: f64| tol.unwrap_or(default);
    match id {
        "erasure" => erasure(&ns, t(1e-9)),
        "quantizer" => quantizer(&ns, t(1e-9)),
        "noninformative" => noninformative(&ns, t(1e-9)),
        "setwise" => setwise(&ns, t(1e-6)),
        "mismatch_setwise" => mismatch_setwise(&ns, t(1e-6), t(1e-4)),
        "wasserstein_additive" => wasserstein_additive(&ns),
        "avg_cost_doubling" => doubling(&ns, t(1e-3), t(1e-12)),
        "discounted_bounds" => discounted(&ns),
        other => Err(CliError::Usage(format!("unknown example `{other}`; see `reproduce --list`"))),
    }
}

fn check_n(f: Family, ns: &[usize]) -> Result<()> {
    match ns.iter().find(|&&n| n < f.min_n()) {
        Some(n) => Err(CliError::Usage(format!("{} needs n ≥ {}, got {n}", f.id(), f.min_n()))),
        None => Ok(()),
    }
}

fn erasure(ns: &[usize], tol: f64) -> Result<Vec<CheckRow>> {
    let f = Family::ErasurePair;
    check_n(f, ns)?;
    let id = "erasure";
    let base = f.instance(2)?;
    let j_p = optimal_cost(&base.p, &base.channel, &base.cost)?;
    let mut rows = vec![CheckRow::assert(id, "J*(P)", None, j_p, 1.0 / 6.0, Provenance::Paper, tol)];
    let mut last = None;
    for &n in ns {
        let i = f.instance(n)?;
        let nf = n as f64;
        let j_n = optimal_cost(&i.p_n, &i.channel, &i.cost)?;
        rows.push(CheckRow::assert(id, "J*(P_n)", Some(n), j_n, f.optimal_cost_n(n), Provenance::Derived, tol));
        let published = (3.0 * nf * nf + 2.0 * nf + 3.0) / (16.0 * nf * nf);
        rows.push(CheckRow::flag(id, "J*(P_n) vs published formula", Some(n), j_n, published, tol));
        let wrong = optimal_policy(&i.p_n, &i.channel, &i.cost)?;
        let mismatch = evaluate_policy(&i.p, &i.channel, &i.cost, &wrong)?;
        rows.push(CheckRow::assert(
            id,
            "J(P,Q,g*_Pn) vs published formula",
            Some(n),
            mismatch,
            f.mismatch_cost(n),
            Provenance::Derived,
            tol,
        ));
        rows.push(CheckRow::info(id, "TV(P_n,P)", Some(n), total_variation(&i.p_n, &i.p)?));
        rows.push(CheckRow::info(id, "BL(P_n,P)", Some(n), bounded_lipschitz_distance(&i.p_n, &i.p, BL_MESH)?));
        last = Some((n, j_n));
    }
    if let Some((n, j_n)) = last {
        let jump = (j_n - j_p).abs();
        rows.push(CheckRow::condition(id, "|J*(P_n) - J*(P)| > 1/30", Some(n), jump, jump > 1.0 / 30.0));
    }
    rows.push(CheckRow::flag(id, "lim J*(P_n) vs published 3/16", None, 0.125, 3.0 / 16.0, tol));
    Ok(rows)
}

fn quantizer(ns: &[usize], tol: f64) -> Result<Vec<CheckRow>> {
    let f = Family::QuantizerPair;
    check_n(f, ns)?;
    let id = "quantizer";
    let base = f.instance(2)?;
    let j_p = optimal_cost(&base.p, &base.channel, &base.cost)?;
    let mut rows = vec![CheckRow::assert(id, "J*(P)", None, j_p, 1.0 / 16.0, Provenance::Paper, tol)];
    for &n in ns {
        let i = f.instance(n)?;
        let j_n = optimal_cost(&i.p_n, &i.channel, &i.cost)?;
        rows.push(CheckRow::assert(id, "J*(P_n)", Some(n), j_n, 0.0, Provenance::Paper, tol));
        let wrong = optimal_policy(&i.p_n, &i.channel, &i.cost)?;
        let mismatch = evaluate_policy(&i.p, &i.channel, &i.cost, &wrong)?;
        rows.push(CheckRow::assert(id, "J(P,Q,g*_Pn)", Some(n), mismatch, f.mismatch_cost(n), Provenance::Derived, tol));
        rows.push(CheckRow::info(id, "BL(P_n,P)", Some(n), bounded_lipschitz_distance(&i.p_n, &i.p, BL_MESH)?));
    }
    Ok(rows)
}

fn noninformative(ns: &[usize], tol: f64) -> Result<Vec<CheckRow>> {
    let f = Family::Noninformative;
    check_n(f, ns)?;
    let id = "noninformative";
    let mut rows = Vec::new();
    for &n in ns {
        let i = f.instance(n)?;
        let j_n = optimal_cost(&i.p_n, &i.channel, &i.cost)?;
        rows.push(CheckRow::assert(id, "J*(P_n)", Some(n), j_n, f.optimal_cost_n(n), Provenance::Derived, tol));
        let stated = if n >= 10 {
            CheckRow::assert(id, "J*(P_n) vs stated 1", Some(n), j_n, 1.0, Provenance::Paper, 4e-3)
        } else {
            CheckRow::flag(id, "J*(P_n) vs stated 1", Some(n), j_n, 1.0, 4e-3)
        };
        rows.push(stated);
        let j_p = optimal_cost(&i.p, &i.channel, &i.cost)?;
        rows.push(CheckRow::assert(id, "J*(P)", Some(n), j_p, 0.0, Provenance::Paper, tol));
        let wrong = optimal_policy(&i.p_n, &i.channel, &i.cost)?;
        let mismatch = evaluate_policy(&i.p, &i.channel, &i.cost, &wrong)?;
        rows.push(CheckRow::assert(id, "J(P,Q,g*_Pn)", Some(n), mismatch, 0.0, Provenance::Derived, tol));
    }
    Ok(rows)
}

fn setwise(ns: &[usize], tol: f64) -> Result<Vec<CheckRow>> {
    let f = Family::SetwiseSquareWave;
    check_n(f, ns)?;
    let id = "setwise";
    let base = f.instance(1)?;
    let j_p = optimal_cost(&base.p, &base.channel, &base.cost)?;
    let mut rows = vec![CheckRow::assert(id, "J*(P)", None, j_p, 1.0 / 16.0, Provenance::Paper, tol)];
    for &n in ns {
        let i = f.instance(n)?;
        let j_n = optimal_cost(&i.p_n, &i.channel, &i.cost)?;
        rows.push(CheckRow::assert(id, "J*(P_n)", Some(n), j_n, f.optimal_cost_n(n), Provenance::Paper, tol));
        rows.push(CheckRow::info(id, "TV(P_n,P)", Some(n), total_variation(&i.p_n, &i.p)?));
    }
    Ok(rows)
}

fn mismatch_setwise(ns: &[usize], tol: f64, gap_tol: f64) -> Result<Vec<CheckRow>> {
    let f = Family::SetwiseSquareWave;
    check_n(f, ns)?;
    let id = "mismatch_setwise";
    let base = f.instance(1)?;
    let j_p = optimal_cost(&base.p, &base.channel, &base.cost)?;
    let mut rows = Vec::new();
    for &n in ns {
        let i = f.instance(n)?;
        let wrong = optimal_policy(&i.p_n, &i.channel, &i.cost)?;
        let mismatch = evaluate_policy(&i.p, &i.channel, &i.cost, &wrong)?;
        rows.push(CheckRow::assert(id, "J(P,Q,g*_Pn)", Some(n), mismatch, f.mismatch_cost(n), Provenance::Paper, tol));
        let gap = mismatch - j_p;
        let bound = 2.0 * i.cost.sup_norm * total_variation(&i.p_n, &i.p)?;
        rows.push(CheckRow::condition(id, "0 <= gap <= 2|c| TV", Some(n), gap, gap >= -1e-9 && gap <= bound + 1e-9));
        if n >= 50 {
            rows.push(CheckRow::assert(id, "gap vs 5/432", Some(n), gap, 5.0 / 432.0, Provenance::Paper, gap_tol));
        } else {
            rows.push(CheckRow::info(id, "gap", Some(n), gap));
        }
    }
    Ok(rows)
}

fn unit() -> Interval {
    Interval::unit()
}

fn wasserstein_additive(ks: &[usize]) -> Result<Vec<CheckRow>> {
    let id = "wasserstein_additive";
    let q = Channel::pure(unit(), ChannelKind::Additive(NoiseDensity::triangular(0.25)?))?;
    let c = CostFunction::quadratic(unit(), unit())?;
    let alpha = estimate_alpha(&q, &c, ALPHA_GRID)?;
    let mut rows = vec![CheckRow::info(id, "alpha", None, alpha)];
    let a = MixedMeasure::dirac(unit(), 0.4)?;
    let b = MixedMeasure::dirac(unit(), 0.5)?;
    let r = wasserstein_bound(&a, &b, &q, &c, Some(alpha))?;
    rows.push(CheckRow::condition(id, "gap <= alpha W1 (0.4 vs 0.5)", None, r.gap, r.pass));
    let same = wasserstein_bound(&b, &b, &q, &c, Some(alpha))?;
    rows.push(CheckRow::condition(id, "gap <= alpha W1 (identical)", None, same.gap, same.pass));
    let mix = MixedMeasure::discrete(unit(), &[(0.2, 0.5), (0.5, 0.5)])?;
    for &k in ks {
        if k == 0 || k > 40 {
            return Err(CliError::Usage(format!("shift exponent k = {k} outside 1..=40")));
        }
        let near = MixedMeasure::dirac(unit(), 0.5 + 0.5f64.powi(k as i32))?;
        let r = wasserstein_bound(&b, &near, &q, &c, Some(alpha))?;
        let ratio = r.gap / r.w1;
        rows.push(CheckRow::condition(id, "gap / W1 <= alpha (point shift 2^-k)", Some(k), ratio, r.pass));
        let moved = MixedMeasure::discrete(unit(), &[(0.2, 0.5), (0.5 + 0.3 * 0.5f64.powi(k as i32), 0.5)])?;
        let r = wasserstein_bound(&mix, &moved, &q, &c, Some(alpha))?;
        rows.push(CheckRow::condition(id, "gap / W1 <= alpha (mixture shift)", Some(k), r.gap / r.w1, r.pass));
    }
    Ok(rows)
}

/// Steps of the running average.
pub const DOUBLING_STEPS: usize = 1_000_000;

fn doubling(ns: &[usize], tol: f64, exact_tol: f64) -> Result<Vec<CheckRow>> {
    let id = "avg_cost_doubling";
    let mut rows = Vec::new();
    for &n in ns {
        if n < 2 {
            return Err(CliError::Usage(format!("{id} needs n ≥ 2, got {n}")));
        }
        let r = average_cost_doubling_example(n, DOUBLING_STEPS)?;
        rows.push(CheckRow::assert(id, "average vs limit 1", Some(n), r.average, 1.0, Provenance::Paper, tol));
        rows.push(CheckRow::assert(
            id,
            "average vs direct summation",
            Some(n),
            r.average,
            r.closed_form,
            Provenance::Derived,
            exact_tol,
        ));
        rows.push(CheckRow::flag(id, "average vs published bracket", Some(n), r.average, r.published_bracket, exact_tol));
    }
    let delta0 = MixedMeasure::dirac(Interval::new(-1.0, 1.0)?, 0.0)?;
    let zero = doubling_running_average(&delta0, DOUBLING_STEPS)?;
    rows.push(CheckRow::assert(id, "average under delta_0", None, zero, 0.0, Provenance::Paper, 0.0));
    Ok(rows)
}

/// Two states, two actions, two observations.
pub fn reference_model() -> FiniteModel {
    FiniteModel::new(
        vec![vec![vec![0.9, 0.1], vec![0.2, 0.8]], vec![vec![0.5, 0.5], vec![0.6, 0.4]]],
        vec![vec![0.8, 0.2], vec![0.3, 0.7]],
        vec![vec![0.0, 1.0], vec![1.0, 0.4]],
        0.9,
    )
    .expect("reference model is valid")
}

fn discounted(horizons: &[usize]) -> Result<Vec<CheckRow>> {
    let id = "discounted_bounds";
    let m = reference_model();
    let p = Belief::new(vec![1.0, 0.0])?;
    let pp = Belief::new(vec![0.6, 0.4])?;
    let mut rows = Vec::new();
    for &h in horizons {
        let r = discounted_tv_bounds(&m, &p, &pp, h)?;
        rows.push(CheckRow::info(id, "J_H(p)", Some(h), r.j_p));
        rows.push(CheckRow::info(id, "J_H(p')", Some(h), r.j_p_prime));
        rows.push(CheckRow::condition(id, "gap <= TV|c|/(1-b) + tail", Some(h), r.gap, r.continuity_pass));
        rows.push(CheckRow::condition(id, "0 <= mismatch <= 2TV|c|/(1-b) + tail", Some(h), r.mismatch, r.mismatch_pass));
        let dev = sup_policy_deviation(&m, &p, &pp, h)?;
        let holds = dev <= r.tv * m.cost_sup() / (1.0 - m.beta) + 1e-9;
        rows.push(CheckRow::condition(id, "sup policy deviation <= TV|c|/(1-b)", Some(h), dev, holds));
        let same = discounted_tv_bounds(&m, &p, &p, h)?;
        rows.push(CheckRow::condition(id, "identical priors: gap = 0", Some(h), same.gap, same.gap == 0.0));
    }
    Ok(rows)
}
