//! Average cost under the deterministic doubling map `x ↦ 2x` with action 0
//! and the truncated quadratic cost.

use crate::error::{Error, Result};
use crate::measures::{Interval, MixedMeasure};
use crate::single_stage::CostFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingReport {
    pub n: usize,
    pub steps: usize,
    /// `(1/N) Σ_{k<N} E c(x_k, 0)` by direct summation.
    pub average: f64,
    pub closed_form: f64,
    /// The displayed finite-`N` bracket `(4n²/3 - 1/3 + N - log₂n + 1) / N`.
    pub published_bracket: f64,
}

/// Running average along the doubling orbits of an atomic prior.
pub fn doubling_running_average(prior: &MixedMeasure, steps: usize) -> Result<f64> {
    if !prior.is_atomic() {
        return Err(Error::Unsupported("doubling example needs an atomic prior".into()));
    }
    if steps == 0 {
        return Err(Error::Argument("need at least one step".into()));
    }
    let cost = CostFunction::truncated_quadratic(Interval::new(0.0, 0.0)?)?;
    let mut total = 0.0;
    for a in prior.atoms() {
        let mut x = a.loc;
        let mut sum = 0.0;
        for _ in 0..steps {
            sum += cost.eval(x, 0.0);
            x *= 2.0;
        }
        total += a.weight * sum;
    }
    Ok(total / steps as f64)
}

/// `(1/N) (Σ_{k ≤ ⌊log₂ n⌋} (2^k/n)² + N - ⌊log₂ n⌋ - 1)` for `N > ⌊log₂ n⌋`.
pub fn doubling_closed_form(n: usize, steps: usize) -> f64 {
    let nf = n as f64;
    let last = usize::BITS - 1 - n.leading_zeros();
    let inside = (last as usize + 1).min(steps);
    let geometric: f64 = (0..inside).map(|k| (2f64.powi(k as i32) / nf).powi(2)).sum();
    (geometric + (steps - inside) as f64) / steps as f64
}

/// Starts at `±1/n` with weight ½ each.
pub fn average_cost_doubling_example(n: usize, steps: usize) -> Result<DoublingReport> {
    if n < 2 {
        return Err(Error::Argument(format!("n = {n} must be at least 2")));
    }
    let x0 = 1.0 / n as f64;
    let prior = MixedMeasure::discrete(Interval::new(-1.0, 1.0)?, &[(-x0, 0.5), (x0, 0.5)])?;
    let average = doubling_running_average(&prior, steps)?;
    let nf = n as f64;
    let big_n = steps as f64;
    Ok(DoublingReport {
        n,
        steps,
        average,
        closed_form: doubling_closed_form(n, steps),
        published_bracket: (4.0 * nf * nf / 3.0 - 1.0 / 3.0 + big_n - nf.log2() + 1.0) / big_n,
    })
}
