//! Executes scenarios and renders their tables.

use std::path::PathBuf;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use priorlab::belief_mdp::{discounted_tv_bounds, sup_policy_deviation, value_iteration, FiniteModel};
use priorlab::empirical_lab::{run_consistency_experiment, ExperimentPlan};
use priorlab::families::Family;
use priorlab::measures::{wasserstein1, MixedMeasure};
use priorlab::channels::Channel;
use priorlab::single_stage::{mismatch_tv_bound, tv_continuity_gap, wasserstein_bound, CostFunction};

use crate::error::Result;
use crate::report::{num, CheckRow, Status, Table};
use crate::reproduce::reproduce;
use crate::scenario::{BeliefMdp, BoundCheck, Empirical, Kind, Pair, Scenario, Seeds, SingleStage};

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub parallel: bool,
}

/// Result of one scenario: named tables plus a verdict.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: String,
    /// `(file stem, table)`; the first table is the main one.
    pub tables: Vec<(String, Table)>,
    pub notes: Vec<String>,
    pub failed: bool,
}

impl Outcome {
    pub fn render(&self) -> String {
        let mut out = format!("== {} ==\n", self.id);
        for (i, (stem, t)) in self.tables.iter().enumerate() {
            if i > 0 {
                out += &format!("-- {stem} --\n");
            }
            out += &t.to_text();
        }
        for n in &self.notes {
            out += n;
            out.push('\n');
        }
        out += if self.failed { "result: FAIL\n" } else { "result: PASS\n" };
        out
    }

    pub fn write(&self, opts: &Options) -> Result<()> {
        if let Some(dir) = &opts.out {
            std::fs::create_dir_all(dir)?;
            for (stem, t) in &self.tables {
                t.write_csv(&dir.join(format!("{stem}.csv")))?;
            }
        }
        Ok(())
    }
}

pub fn checks_outcome(id: &str, rows: Vec<CheckRow>) -> Outcome {
    let failed = rows.iter().any(|r| r.status == Status::Fail);
    let flagged = rows.iter().filter(|r| r.status == Status::Flagged).count();
    let mut notes = Vec::new();
    if flagged > 0 {
        notes.push(format!("{flagged} published figure(s) FLAGGED; asserted values are unaffected"));
    }
    Outcome {
        id: id.to_string(),
        tables: vec![(id.to_string(), Table::from_checks(&rows))],
        notes,
        failed,
    }
}

pub fn run_scenario(s: &Scenario, opts: &Options) -> Result<Outcome> {
    match &s.kind {
        Kind::Reproduce { example, ns } => Ok(checks_outcome(&s.id, reproduce(example, ns, opts.tol)?)),
        Kind::SingleStage(ss) => single_stage(&s.id, ss),
        Kind::Empirical(e) => empirical(&s.id, e, &s.canonical, opts),
        Kind::BeliefMdp(b) => belief_mdp(&s.id, b, opts),
    }
}

/// Runs scenarios in declared order, or concurrently with results ordered by id.
pub fn run_all(scenarios: &[Scenario], opts: &Options) -> Vec<(String, Result<Outcome>)> {
    if opts.parallel {
        let mut out: Vec<(String, Result<Outcome>)> =
            scenarios.par_iter().map(|s| (s.id.clone(), run_scenario(s, opts))).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    } else {
        scenarios.iter().map(|s| (s.id.clone(), run_scenario(s, opts))).collect()
    }
}

const SINGLE_STAGE_COLUMNS: [&str; 11] =
    ["scenario_id", "check", "n", "J_star_P", "J_star_Pn", "J_mismatch", "tv", "w1", "bound", "alpha", "pass"];

struct PairInstance {
    n: Option<usize>,
    p: MixedMeasure,
    p_n: MixedMeasure,
    channel: Channel,
    cost: CostFunction,
}

fn instances(pair: &Pair) -> Result<Vec<PairInstance>> {
    match pair {
        Pair::Family { family, ns } => ns
            .iter()
            .map(|&n| {
                let i = family.instance(n)?;
                Ok(PairInstance {
                    n: Some(n),
                    p: i.p,
                    p_n: i.p_n,
                    channel: i.channel,
                    cost: i.cost,
                })
            })
            .collect(),
        Pair::Explicit { p, p_prime, channel, cost } => Ok(vec![PairInstance {
            n: None,
            p: p.clone(),
            p_n: p_prime.clone(),
            channel: channel.clone(),
            cost: cost.clone(),
        }]),
    }
}

pub fn single_stage(id: &str, ss: &SingleStage) -> Result<Outcome> {
    let mut table = Table::new(&SINGLE_STAGE_COLUMNS);
    let mut failed = false;
    for inst in instances(&ss.pair)? {
        let n = inst.n.map(|n| n.to_string()).unwrap_or_default();
        let w1 = wasserstein1(&inst.p, &inst.p_n)?;
        for check in &ss.checks {
            let (name, jp, jpn, jm, tv, bound, alpha, pass) = match check {
                BoundCheck::Tv => {
                    let r = tv_continuity_gap(&inst.p, &inst.p_n, &inst.channel, &inst.cost)?;
                    ("tv_continuity", r.j_p, r.j_p_prime, f64::NAN, r.tv, r.bound, f64::NAN, r.pass)
                }
                BoundCheck::Mismatch => {
                    let r = mismatch_tv_bound(&inst.p, &inst.p_n, &inst.channel, &inst.cost)?;
                    ("tv_mismatch", r.j_star, f64::NAN, r.j_mismatch, r.tv, r.bound, f64::NAN, r.pass)
                }
                BoundCheck::Wasserstein => {
                    let r = wasserstein_bound(&inst.p, &inst.p_n, &inst.channel, &inst.cost, ss.alpha)?;
                    ("wasserstein", r.j_p, r.j_p_prime, f64::NAN, f64::NAN, r.bound, r.alpha, r.pass)
                }
            };
            failed |= !pass;
            table.push(vec![
                id.to_string(),
                name.to_string(),
                n.clone(),
                num(jp),
                num(jpn),
                num(jm),
                num(tv),
                num(w1),
                num(bound),
                num(alpha),
                pass.to_string(),
            ]);
        }
    }
    Ok(Outcome {
        id: id.to_string(),
        tables: vec![(id.to_string(), table)],
        notes: Vec::new(),
        failed,
    })
}

/// SHA-256 of the scenario text and the resolved seeds.
pub fn plan_hash(canonical: &str, seeds: &[u64]) -> String {
    let mut h = Sha256::new();
    h.update(canonical.as_bytes());
    h.update(b"seeds");
    for s in seeds {
        h.update(s.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

const EMPIRICAL_COLUMNS: [&str; 8] = ["n", "seed", "J_star_empirical", "J_mismatch", "bl", "tv", "w1", "plan_hash"];

pub fn empirical(id: &str, e: &Empirical, canonical: &str, opts: &Options) -> Result<Outcome> {
    let seeds: Vec<u64> = match &e.seeds {
        Seeds::List(v) => v.clone(),
        Seeds::Count(k) => (0..*k as u64).map(|i| opts.seed.wrapping_add(i)).collect(),
    };
    let plan = ExperimentPlan::new(e.prior.clone(), e.channel.clone(), e.cost.clone(), e.sizes.clone(), seeds.clone())?;
    let result = run_consistency_experiment(&plan, opts.parallel)?;
    let hash = plan_hash(canonical, &seeds);
    let mut table = Table::new(&EMPIRICAL_COLUMNS);
    let mut failed = false;
    for r in &result.rows {
        failed |= r.j_mismatch < result.j_star - 1e-9;
        table.push(vec![
            r.n.to_string(),
            r.seed.to_string(),
            num(r.j_star_empirical),
            num(r.j_mismatch),
            num(r.bl),
            num(r.tv),
            num(r.w1),
            hash.clone(),
        ]);
    }
    let mut notes = vec![format!("J*(P,Q) = {}", num(result.j_star))];
    for &n in &plan.sample_sizes {
        notes.push(format!(
            "n = {n}: median |J(P,Q,g*) - J*| = {}, median |J*(P_hat) - J*| = {}",
            num(result.median_mismatch_gap(n).unwrap_or(f64::NAN)),
            num(result.median_cost_gap(n).unwrap_or(f64::NAN)),
        ));
    }
    if let (Some(&lo), Some(&hi)) = (plan.sample_sizes.first(), plan.sample_sizes.last()) {
        if hi > lo {
            let ratio = result.median_mismatch_gap(hi).unwrap_or(f64::NAN) / result.median_mismatch_gap(lo).unwrap_or(f64::NAN);
            notes.push(format!("median mismatch gap ratio n={hi} / n={lo}: {}", num(ratio)));
        }
    }
    if failed {
        notes.push("a row has J(P,Q,g*) below J*(P,Q)".into());
    }
    Ok(Outcome {
        id: id.to_string(),
        tables: vec![(id.to_string(), table)],
        notes,
        failed,
    })
}

/// Default simplex resolution and tolerance of value iteration.
pub const VI_RESOLUTION: u32 = 10;
pub const VI_TOL: f64 = 1e-6;

pub fn value_table(model: &FiniteModel, resolution: u32, tol: f64) -> Result<(Table, Vec<String>)> {
    let vt = value_iteration(model, resolution, tol)?;
    let mut table = Table::new(&["belief", "value", "action"]);
    for i in 0..vt.grid.len() {
        let z = vt.grid.belief(i);
        let w: Vec<String> = z.weights().iter().map(|&v| num(v)).collect();
        table.push(vec![w.join(" "), num(vt.values[i]), vt.policy[i].to_string()]);
    }
    let notes = vec![
        format!("value iteration: {} sweeps, final residual {}", vt.residuals.len(), num(*vt.residuals.last().unwrap_or(&0.0))),
        format!("stopping threshold {}, projection slack 2|c|/resolution = {}", num(vt.threshold), num(2.0 * model.cost_sup() / resolution as f64)),
    ];
    Ok((table, notes))
}

pub fn belief_mdp(id: &str, b: &BeliefMdp, opts: &Options) -> Result<Outcome> {
    let mut tables = Vec::new();
    let mut notes = Vec::new();
    let mut rows = Vec::new();
    if let (Some(p), Some(pp)) = (&b.prior, &b.prior_prime) {
        let h = b.horizon.unwrap_or(8);
        let r = discounted_tv_bounds(&b.model, p, pp, h)?;
        rows.push(CheckRow::info(id, "J_H(p)", Some(h), r.j_p));
        rows.push(CheckRow::info(id, "J_H(p')", Some(h), r.j_p_prime));
        rows.push(CheckRow::info(id, "TV(p,p')", Some(h), r.tv));
        rows.push(CheckRow::info(id, "tail", Some(h), r.tail));
        rows.push(CheckRow::condition(id, "gap <= TV|c|/(1-b) + tail", Some(h), r.gap, r.continuity_pass));
        rows.push(CheckRow::condition(id, "0 <= mismatch <= 2TV|c|/(1-b) + tail", Some(h), r.mismatch, r.mismatch_pass));
        let dev = sup_policy_deviation(&b.model, p, pp, h)?;
        let holds = dev <= r.tv * b.model.cost_sup() / (1.0 - b.model.beta) + 1e-9;
        rows.push(CheckRow::condition(id, "sup policy deviation <= TV|c|/(1-b)", Some(h), dev, holds));
    }
    let failed = rows.iter().any(|r| r.status == Status::Fail);
    if !rows.is_empty() {
        tables.push((id.to_string(), Table::from_checks(&rows)));
    }
    if b.resolution.is_some() || rows.is_empty() {
        let res = b.resolution.unwrap_or(VI_RESOLUTION);
        let tol = b.tol.or(opts.tol).unwrap_or(VI_TOL);
        let (t, n) = value_table(&b.model, res, tol)?;
        tables.push((format!("{id}_values"), t));
        notes.extend(n);
    }
    Ok(Outcome {
        id: id.to_string(),
        tables,
        notes,
        failed,
    })
}

/// Family pairs for `bounds` without a scenario file.
pub fn family_bounds(family: Family, ns: &[usize], checks: &[BoundCheck]) -> Result<Outcome> {
    let ss = SingleStage {
        pair: Pair::Family { family, ns: ns.to_vec() },
        checks: checks.to_vec(),
        alpha: None,
    };
    single_stage(family.id(), &ss)
}
