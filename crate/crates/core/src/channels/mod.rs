//! Measurement channels `Q(dy|x)` built as finite mixtures of deterministic
//! maps and conditional densities.
//!
//! The observation is always a real number. Quantizer cells are labelled
//! `0, 1, …, M-1` and those labels are the observations.

mod bayes;
mod joint;
pub mod text;

pub use bayes::{BayesModel, ObservationSupport};
pub use joint::{joint_tv_identity_check, JointTvReport, JOINT_COMPONENT_LIMIT};

use crate::error::{Error, Result};
use crate::measures::{sort_dedup, sum_overlapping, Atom, Interval, MixedMeasure, Piece, Poly, total_variation};

/// Tolerance on the sum of component weights.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Partition of the state domain into cells `[b0,b1), [b1,b2), …, [b_{M-1}, b_M]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantizer {
    bounds: Vec<f64>,
}

impl Quantizer {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.len() < 2 || bounds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("quantizer", "cell bounds must be strictly increasing, at least two"));
        }
        Ok(Quantizer { bounds })
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn cells(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Label of the cell containing `x`; points outside clamp to the end cells.
    pub fn label(&self, x: f64) -> usize {
        let idx = self.bounds.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.cells() - 1)
    }

    /// `(lo, hi, closed_hi)` of cell `i`.
    pub fn cell(&self, i: usize) -> (f64, f64, bool) {
        (self.bounds[i], self.bounds[i + 1], i + 1 == self.cells())
    }
}

/// Density `η` of an additive noise `w` in `y = x + w`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseDensity {
    pieces: Vec<Piece>,
}

impl NoiseDensity {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let m = MixedMeasure::from_parts(
            Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            },
            Vec::new(),
            pieces,
        )?;
        if (m.mass() - 1.0).abs() > crate::measures::MASS_TOL {
            return Err(Error::invalid("noise density", format!("mass {}", m.mass())));
        }
        Ok(NoiseDensity {
            pieces: m.pieces().to_vec(),
        })
    }

    /// Triangular density on `[-h, h]` with peak `1/h`.
    pub fn triangular(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Argument(format!("triangular half-width {half_width}")));
        }
        let h = half_width;
        let h2 = h * h;
        Self::new(vec![
            Piece::new(-h, 0.0, Poly::linear(h / h2, 1.0 / h2)),
            Piece::new(0.0, h, Poly::linear(h / h2, -1.0 / h2)),
        ])
    }

    /// Gaussian `N(0, σ²)` truncated to `[-6σ, 6σ]` and replaced by a cubic
    /// Hermite interpolant on cells of width `σ/16`, rescaled to unit mass.
    /// The sup-distance to the untruncated Gaussian density is below `1e-6/σ`.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Argument(format!("gaussian sigma {sigma}")));
        }
        let pdf = |t: f64| (-0.5 * (t / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let dpdf = |t: f64| -t / (sigma * sigma) * pdf(t);
        let cells = 6 * 2 * 16;
        let step = sigma / 16.0;
        let pieces: Vec<Piece> = (0..cells)
            .map(|k| {
                let a = -6.0 * sigma + step * k as f64;
                let b = a + step;
                Piece::new(a, b, Poly::hermite(a, b, pdf(a), pdf(b), dpdf(a), dpdf(b)))
            })
            .collect();
        let mass: f64 = pieces.iter().map(Piece::mass).sum();
        Self::new(pieces.iter().map(|p| p.scaled(1.0 / mass)).collect())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn support(&self) -> Interval {
        Interval {
            lo: self.pieces.first().map_or(0.0, |p| p.lo),
            hi: self.pieces.last().map_or(0.0, |p| p.hi),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.hi <= t);
        match self.pieces.get(idx) {
            Some(p) if p.lo <= t && t < p.hi => p.density.eval(t),
            _ => 0.0,
        }
    }

    /// Knots of `η`, including the ends of the support.
    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        sort_dedup(&mut k);
        k
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    /// `y = x`
    Identity,
    /// `y = y0` regardless of `x`.
    Constant(f64),
    Quantizer(Quantizer),
    /// `y ~ U[lo, hi]` independent of `x`.
    UniformNoise { lo: f64, hi: f64 },
    /// `y = x + w`, `w ~ η`.
    Additive(NoiseDensity),
}

impl ChannelKind {
    pub fn has_density(&self) -> bool {
        matches!(self, ChannelKind::UniformNoise { .. } | ChannelKind::Additive(_))
    }

    /// Conditional density `g(y|x)` of a density component.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        match self {
            ChannelKind::UniformNoise { lo, hi } => {
                if y >= *lo && y < *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            ChannelKind::Additive(eta) => eta.eval(y - x),
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub kind: ChannelKind,
}

/// Finite mixture kernel from the state domain to the observation line.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    input: Interval,
    components: Vec<Component>,
}

impl Channel {
    pub fn new(input: Interval, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("channel", "no components"));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if components.iter().any(|c| !(c.weight >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::invalid("channel", format!("component weights sum to {total}")));
        }
        for c in &components {
            match &c.kind {
                ChannelKind::Quantizer(q) => {
                    let b = q.bounds();
                    if (b[0] - input.lo).abs() > 1e-12 || (b[b.len() - 1] - input.hi).abs() > 1e-12 {
                        return Err(Error::invalid("channel", "quantizer cells must partition the state domain"));
                    }
                }
                ChannelKind::UniformNoise { lo, hi } if !(hi > lo) => {
                    return Err(Error::invalid("channel", format!("uniform noise on [{lo}, {hi}]")));
                }
                _ => {}
            }
        }
        Ok(Channel { input, components })
    }

    /// Single-component channel.
    pub fn pure(input: Interval, kind: ChannelKind) -> Result<Self> {
        Self::new(input, vec![Component { weight: 1.0, kind }])
    }

    /// Two-component mixture `w·first + (1-w)·second`.
    pub fn mixture(input: Interval, w: f64, first: ChannelKind, second: ChannelKind) -> Result<Self> {
        Self::new(
            input,
            vec![
                Component { weight: w, kind: first },
                Component {
                    weight: 1.0 - w,
                    kind: second,
                },
            ],
        )
    }

    pub fn input_domain(&self) -> Interval {
        self.input
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// True when every component has a conditional density (Lebesgue on `Y`).
    pub fn has_density(&self) -> bool {
        self.components.iter().all(|c| c.kind.has_density())
    }

    /// Closed hull of every possible observation.
    pub fn output_domain(&self) -> Interval {
        self.components
            .iter()
            .map(|c| match &c.kind {
                ChannelKind::Identity => self.input,
                ChannelKind::Constant(y0) => Interval { lo: *y0, hi: *y0 },
                ChannelKind::Quantizer(q) => Interval {
                    lo: 0.0,
                    hi: (q.cells() - 1) as f64,
                },
                ChannelKind::UniformNoise { lo, hi } => Interval { lo: *lo, hi: *hi },
                ChannelKind::Additive(eta) => {
                    let s = eta.support();
                    Interval {
                        lo: self.input.lo + s.lo,
                        hi: self.input.hi + s.hi,
                    }
                }
            })
            .reduce(|a, b| a.hull(&b))
            .expect("channel has components")
    }

    /// Total conditional density `Σ_k w_k g_k(y|x)` over the density components.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.kind.density(x, y)).sum()
    }

    /// The law `Q(·|x)` on the output domain.
    pub fn kernel(&self, x: f64) -> MixedMeasure {
        let mut atoms = Vec::new();
        let mut pieces = Vec::new();
        for c in &self.components {
            let w = c.weight;
            match &c.kind {
                ChannelKind::Identity => atoms.push(Atom { loc: x, weight: w }),
                ChannelKind::Constant(y0) => atoms.push(Atom { loc: *y0, weight: w }),
                ChannelKind::Quantizer(q) => atoms.push(Atom {
                    loc: q.label(x) as f64,
                    weight: w,
                }),
                ChannelKind::UniformNoise { lo, hi } => {
                    pieces.push(Piece::new(*lo, *hi, Poly::constant(w / (hi - lo))))
                }
                ChannelKind::Additive(eta) => pieces.extend(
                    eta.pieces()
                        .iter()
                        .map(|p| Piece::new(p.lo + x, p.hi + x, p.density.compose_affine(-x, 1.0).scale(w))),
                ),
            }
        }
        MixedMeasure::raw(self.output_domain(), atoms, sum_overlapping(pieces))
    }
}

/// `‖Q(·|x) − Q(·|x')‖_TV`, exact from the component decomposition.
pub fn channel_tv_modulus(q: &Channel, x: f64, x_prime: f64) -> Result<f64> {
    for v in [x, x_prime] {
        if !q.input_domain().contains(v) {
            return Err(Error::Domain(format!("{v} is outside the channel input domain")));
        }
    }
    if x == x_prime {
        return Ok(0.0);
    }
    total_variation(&q.kernel(x), &q.kernel(x_prime))
}

/// Output marginal `PQ(X × ·)`.
pub fn output_marginal(prior: &MixedMeasure, q: &Channel) -> Result<MixedMeasure> {
    BayesModel::new(prior.clone(), q.clone())?.marginal()
}

/// Bayes posterior of the state given observation `y`.
pub fn posterior(prior: &MixedMeasure, q: &Channel, y: f64) -> Result<MixedMeasure> {
    BayesModel::new(prior.clone(), q.clone())?.posterior(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::unit()
    }

    #[test]
    fn weights_must_sum_to_one() {
        let err = Channel::new(
            unit(),
            vec![
                Component {
                    weight: 0.5,
                    kind: ChannelKind::Identity,
                },
                Component {
                    weight: 0.4,
                    kind: ChannelKind::Constant(0.0),
                },
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn quantizer_must_partition() {
        let q = Quantizer::new(vec![0.0, 0.5, 0.9]).unwrap();
        assert!(Channel::pure(unit(), ChannelKind::Quantizer(q)).is_err());
    }

    #[test]
    fn quantizer_labels() {
        let q = Quantizer::new(vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(q.label(0.0), 0);
        assert_eq!(q.label(0.4999), 0);
        assert_eq!(q.label(0.5), 1);
        assert_eq!(q.label(1.0), 1);
    }

    #[test]
    fn tv_modulus_examples() {
        let quant = Channel::pure(
            unit(),
            ChannelKind::Quantizer(Quantizer::new(vec![0.0, 0.5, 1.0]).unwrap()),
        )
        .unwrap();
        assert_eq!(channel_tv_modulus(&quant, 0.49, 0.51).unwrap(), 2.0);
        assert_eq!(channel_tv_modulus(&quant, 0.3, 0.3).unwrap(), 0.0);

        let noise = Channel::pure(unit(), ChannelKind::UniformNoise { lo: 0.0, hi: 1.0 }).unwrap();
        assert_eq!(channel_tv_modulus(&noise, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn tv_modulus_additive_triangular_shrinks() {
        // Oracle: midpoint quadrature of |η(y − x) − η(y − x')| over y.
        let h = 0.25;
        let eta = NoiseDensity::triangular(h).unwrap();
        let q = Channel::pure(unit(), ChannelKind::Additive(eta.clone())).unwrap();
        let x = 0.3;
        let mut last = f64::INFINITY;
        for k in 1..=12 {
            let d = 2f64.powi(-k);
            let exact = channel_tv_modulus(&q, x, (x + d).min(1.0)).unwrap();
            let xp = (x + d).min(1.0);
            let steps = 400_000;
            let (lo, hi) = (x - h - 1.0, x + h + 1.0);
            let dy = (hi - lo) / steps as f64;
            let oracle: f64 = (0..steps)
                .map(|i| {
                    let y = lo + (i as f64 + 0.5) * dy;
                    (eta.eval(y - x) - eta.eval(y - xp)).abs() * dy
                })
                .sum();
            assert!((exact - oracle).abs() < 1e-6, "k={k}: {exact} vs {oracle}");
            assert!(exact < last);
            last = exact;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn gaussian_approximation_error() {
        let sigma = 0.2;
        let g = NoiseDensity::gaussian(sigma).unwrap();
        let pdf = |t: f64| (-0.5 * (t / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let worst = (0..200_000)
            .map(|i| {
                let t = -8.0 * sigma + 16.0 * sigma * i as f64 / 200_000.0;
                (g.eval(t) - pdf(t)).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst * sigma <= 1e-6, "{worst}");
    }

    #[test]
    fn output_domain_hull() {
        let q = Channel::mixture(
            unit(),
            0.5,
            ChannelKind::Identity,
            ChannelKind::Additive(NoiseDensity::triangular(0.25).unwrap()),
        )
        .unwrap();
        assert_eq!(q.output_domain(), Interval { lo: -0.25, hi: 1.25 });
    }
}
