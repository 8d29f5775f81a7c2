//! Stage costs `c(x, u)` and their exact expectations under (sub-)measures.

use crate::error::{Error, Result};
use crate::measures::{Interval, MixedMeasure};

#[derive(Clone, Debug, PartialEq)]
pub enum CostKind {
    /// `(x - u)²`
    Quadratic,
    /// `(x + u)²` for `|x| ≤ 1`, `(1 + u)²` otherwise.
    TruncatedQuadratic,
    /// Bilinear interpolation of `values[i][j] = c(xs[i], us[j])`, constant
    /// beyond the grid.
    Tabulated {
        xs: Vec<f64>,
        us: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction {
    pub kind: CostKind,
    /// Compact action interval.
    pub actions: Interval,
    /// `‖c‖∞` over the state domain and the action interval.
    pub sup_norm: f64,
    /// Lipschitz constant of `c(·, u)`, uniform in `u`, when known.
    pub lipschitz_x: Option<f64>,
}

impl CostFunction {
    /// `(x - u)²` on `states × actions`.
    pub fn quadratic(states: Interval, actions: Interval) -> Result<Self> {
        if !states.is_bounded() || !actions.is_bounded() {
            return Err(Error::Argument("quadratic cost needs bounded state and action intervals".into()));
        }
        let reach = (states.hi - actions.lo).abs().max((actions.hi - states.lo).abs());
        Ok(CostFunction {
            kind: CostKind::Quadratic,
            actions,
            sup_norm: reach * reach,
            lipschitz_x: Some(2.0 * reach),
        })
    }

    pub fn truncated_quadratic(actions: Interval) -> Result<Self> {
        if !actions.is_bounded() {
            return Err(Error::Argument("truncated quadratic cost needs a bounded action interval".into()));
        }
        let r = 1.0 + actions.lo.abs().max(actions.hi.abs());
        Ok(CostFunction {
            kind: CostKind::TruncatedQuadratic,
            actions,
            sup_norm: r * r,
            lipschitz_x: None,
        })
    }

    /// Tabulated cost; `sup_norm` is declared, not inferred from the grid.
    pub fn tabulated(
        xs: Vec<f64>,
        us: Vec<f64>,
        values: Vec<Vec<f64>>,
        sup_norm: f64,
        lipschitz_x: Option<f64>,
    ) -> Result<Self> {
        let increasing = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&xs) || !increasing(&us) {
            return Err(Error::invalid("cost", "table grids must be nonempty and strictly increasing"));
        }
        if values.len() != xs.len() || values.iter().any(|row| row.len() != us.len()) {
            return Err(Error::invalid("cost", "table shape does not match its grids"));
        }
        let max = values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if values.iter().flatten().any(|&v| !(v >= 0.0)) {
            return Err(Error::invalid("cost", "table values must be nonnegative"));
        }
        if sup_norm < max {
            return Err(Error::invalid("cost", format!("declared sup norm {sup_norm} below table maximum {max}")));
        }
        let actions = Interval::new(us[0], us[us.len() - 1])?;
        Ok(CostFunction {
            kind: CostKind::Tabulated { xs, us, values },
            actions,
            sup_norm,
            lipschitz_x,
        })
    }

    pub fn with_actions(mut self, actions: Interval) -> Self {
        self.actions = actions;
        self
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self.kind, CostKind::Quadratic)
    }

    pub fn eval(&self, x: f64, u: f64) -> f64 {
        match &self.kind {
            CostKind::Quadratic => (x - u) * (x - u),
            CostKind::TruncatedQuadratic => {
                if x.abs() <= 1.0 {
                    (x + u) * (x + u)
                } else {
                    (1.0 + u) * (1.0 + u)
                }
            }
            CostKind::Tabulated { xs, us, values } => {
                let (i, s) = locate(xs, x);
                let (j, t) = locate(us, u);
                let at = |a: usize, b: usize| values[a][b];
                let i1 = (i + 1).min(xs.len() - 1);
                let j1 = (j + 1).min(us.len() - 1);
                (1.0 - s) * ((1.0 - t) * at(i, j) + t * at(i, j1)) + s * ((1.0 - t) * at(i1, j) + t * at(i1, j1))
            }
        }
    }

    /// Sufficient statistics of `m` for evaluating `u ↦ ∫ c(x, u) m(dx)`.
    pub fn stats(&self, m: &MixedMeasure) -> SliceStats {
        match &self.kind {
            CostKind::Quadratic => SliceStats::Moments([m.moment(0), m.moment(1), m.moment(2)]),
            CostKind::TruncatedQuadratic => {
                let inside = m.restrict(-1.0, 1.0, true);
                let total = m.mass();
                let m0 = inside.moment(0);
                SliceStats::Truncated {
                    inside: [m0, inside.moment(1), inside.moment(2)],
                    outside: (total - m0).max(0.0),
                }
            }
            CostKind::Tabulated { xs, .. } => {
                let below = m.restrict(f64::NEG_INFINITY, xs[0], false).mass();
                let above = m.restrict(xs[xs.len() - 1], f64::INFINITY, true).mass();
                let segments = xs
                    .windows(2)
                    .map(|w| {
                        let r = m.restrict(w[0], w[1], false);
                        (r.moment(0), r.moment(1))
                    })
                    .collect();
                SliceStats::Table { below, segments, above }
            }
        }
    }

    /// `∫ c(x, u) m(dx)` from precomputed statistics.
    pub fn expected(&self, stats: &SliceStats, u: f64) -> f64 {
        match (stats, &self.kind) {
            (SliceStats::Moments([m0, m1, m2]), _) => m2 - 2.0 * u * m1 + u * u * m0,
            (SliceStats::Truncated { inside: [m0, m1, m2], outside }, _) => {
                m2 + 2.0 * u * m1 + u * u * m0 + outside * (1.0 + u) * (1.0 + u)
            }
            (SliceStats::Table { below, segments, above }, CostKind::Tabulated { xs, us, values }) => {
                let (j, t) = locate(us, u);
                let j1 = (j + 1).min(us.len() - 1);
                let col = |i: usize| (1.0 - t) * values[i][j] + t * values[i][j1];
                let mut acc = below * col(0) + above * col(xs.len() - 1);
                for (i, &(mass, first)) in segments.iter().enumerate() {
                    let (a, b) = (col(i), col(i + 1));
                    let slope = (b - a) / (xs[i + 1] - xs[i]);
                    acc += a * mass + slope * (first - xs[i] * mass);
                }
                acc
            }
            _ => unreachable!("statistics computed for a different cost kind"),
        }
    }
}

impl CostFunction {
    /// Exact minimizer of `u ↦ ∫ c(x, u) m(dx)` over the action interval.
    ///
    /// The expectation is a quadratic in `u` for the two quadratic kinds and
    /// piecewise linear between the `us` nodes for tables, so the minimum
    /// sits at a vertex, a node or an endpoint. Ties go to the smaller `u`.
    pub fn minimize(&self, stats: &SliceStats) -> (f64, f64) {
        let (a, b) = (self.actions.lo, self.actions.hi);
        match (stats, &self.kind) {
            (SliceStats::Moments([m0, m1, _]), _) => {
                let u = if *m0 > 0.0 { self.actions.clamp(m1 / m0) } else { a };
                (u, self.expected(stats, u))
            }
            (SliceStats::Truncated { inside: [m0, m1, _], outside }, _) => {
                let w = m0 + outside;
                let u = if w > 0.0 { self.actions.clamp(-(m1 + outside) / w) } else { a };
                (u, self.expected(stats, u))
            }
            (SliceStats::Table { .. }, CostKind::Tabulated { us, .. }) => {
                let mut best = (a, self.expected(stats, a));
                for u in us.iter().copied().filter(|&u| u > a && u < b).chain([b]) {
                    let v = self.expected(stats, u);
                    if v < best.1 {
                        best = (u, v);
                    }
                }
                best
            }
            _ => unreachable!("statistics computed for a different cost kind"),
        }
    }
}

/// Statistics of a measure sufficient for one cost kind.
#[derive(Clone, Debug, PartialEq)]
pub enum SliceStats {
    Moments([f64; 3]),
    Truncated { inside: [f64; 3], outside: f64 },
    Table { below: f64, segments: Vec<(f64, f64)>, above: f64 },
}

/// Cell index and fractional position of `v` on a sorted grid, clamped.
fn locate(grid: &[f64], v: f64) -> (usize, f64) {
    if grid.len() == 1 || v <= grid[0] {
        return (0, 0.0);
    }
    if v >= grid[grid.len() - 1] {
        return (grid.len() - 1, 0.0);
    }
    let i = grid.partition_point(|&g| g <= v) - 1;
    (i, (v - grid[i]) / (grid[i + 1] - grid[i]))
}
