//! Exact Bayes updates for a mixed prior seen through a mixture channel.
//!
//! The joint law `PQ` splits into a part carried by finitely many observation
//! values (prior atoms through `Identity`, every `Constant`, quantizer labels)
//! and a part with a Lebesgue density in `y` (prior density through
//! `Identity`, every noise component). The marginal of `Y` is dominated by
//! counting measure on the first set plus Lebesgue measure, and for each
//! observation the *slice* of the joint law at `y` is an unnormalized measure
//! on the state space whose mass is the marginal weight (or density) at `y`.
//! Normalizing a slice gives the posterior.

use super::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::measures::poly::binomial;
use crate::measures::{sort_dedup, sum_overlapping, Atom, Interval, MixedMeasure, Piece, Poly, ATOM_MERGE_TOL};

/// How an observation value is classified under the marginal of `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservationSupport {
    /// `Pr(Y = y) > 0`.
    Atomic,
    /// The marginal density at `y` is positive.
    Density,
    /// Neither; the posterior falls back to the prior.
    OffSupport,
}

/// Marginal densities below this are treated as zero by the moment fast path.
const DENSITY_FLOOR: f64 = 1e-14;

/// Precomputed Bayes structure for one `(prior, channel)` pair.
#[derive(Clone, Debug)]
pub struct BayesModel {
    prior: MixedMeasure,
    channel: Channel,
    obs_domain: Interval,
    atomic: Vec<(f64, MixedMeasure)>,
    breakpoints: Vec<f64>,
    has_density_part: bool,
    atom_locs: Vec<f64>,
    // prefix[m][i] = Σ_{j<i} a_j x_j^m over the sorted prior atoms
    prefix: Vec<Vec<f64>>,
    prior_moments: [f64; 3],
}

impl BayesModel {
    pub fn new(prior: MixedMeasure, channel: Channel) -> Result<Self> {
        if !prior.domain().same_as(&channel.input_domain()) {
            return Err(Error::Domain(format!(
                "prior on [{}, {}] but channel input [{}, {}]",
                prior.domain().lo,
                prior.domain().hi,
                channel.input_domain().lo,
                channel.input_domain().hi
            )));
        }
        let obs_domain = channel.output_domain();
        let atomic = atomic_slices(&prior, &channel);

        let mut has_density_part = false;
        let mut knots = vec![obs_domain.lo, obs_domain.hi];
        let mut max_noise_degree = 0;
        for c in channel.components() {
            if c.weight == 0.0 {
                continue;
            }
            match &c.kind {
                ChannelKind::Identity => {
                    if !prior.pieces().is_empty() {
                        has_density_part = true;
                        for p in prior.pieces() {
                            knots.push(p.lo);
                            knots.push(p.hi);
                        }
                    }
                }
                ChannelKind::UniformNoise { lo, hi } => {
                    has_density_part = true;
                    knots.push(*lo);
                    knots.push(*hi);
                }
                ChannelKind::Additive(eta) => {
                    has_density_part = true;
                    let ek = eta.knots();
                    for a in prior.atoms() {
                        knots.extend(ek.iter().map(|k| a.loc + k));
                    }
                    for p in prior.pieces() {
                        knots.extend(ek.iter().map(|k| p.lo + k));
                        knots.extend(ek.iter().map(|k| p.hi + k));
                    }
                    max_noise_degree = max_noise_degree.max(eta.pieces().iter().map(|p| p.density.degree()).max().unwrap_or(0));
                }
                _ => {}
            }
        }
        knots.retain(|&k| k >= obs_domain.lo && k <= obs_domain.hi);
        sort_dedup(&mut knots);

        let atom_locs: Vec<f64> = prior.atoms().iter().map(|a| a.loc).collect();
        let powers = 3 + max_noise_degree;
        let prefix = (0..powers)
            .map(|m| {
                let mut acc = 0.0;
                let mut v = Vec::with_capacity(atom_locs.len() + 1);
                v.push(0.0);
                for a in prior.atoms() {
                    acc += a.weight * a.loc.powi(m as i32);
                    v.push(acc);
                }
                v
            })
            .collect();
        let prior_moments = [prior.moment(0), prior.moment(1), prior.moment(2)];

        Ok(BayesModel {
            prior,
            channel,
            obs_domain,
            atomic,
            breakpoints: knots,
            has_density_part,
            atom_locs,
            prefix,
            prior_moments,
        })
    }

    pub fn prior(&self) -> &MixedMeasure {
        &self.prior
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn observation_domain(&self) -> Interval {
        self.obs_domain
    }

    /// Observation values with positive probability, with their slices.
    pub fn atomic_observations(&self) -> &[(f64, MixedMeasure)] {
        &self.atomic
    }

    /// Whether `Y` has an absolutely continuous part at all.
    pub fn has_density_part(&self) -> bool {
        self.has_density_part
    }

    /// Sorted points between which every density-part quantity is smooth.
    pub fn density_breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn find_atomic(&self, y: f64) -> Option<&MixedMeasure> {
        let idx = self.atomic.partition_point(|(v, _)| *v < y - ATOM_MERGE_TOL);
        match self.atomic.get(idx) {
            Some((v, s)) if (v - y).abs() <= ATOM_MERGE_TOL => Some(s),
            _ => None,
        }
    }

    pub fn support(&self, y: f64) -> ObservationSupport {
        if self.find_atomic(y).is_some() {
            ObservationSupport::Atomic
        } else if self.has_density_part && self.density_moments(y)[0] > DENSITY_FLOOR {
            ObservationSupport::Density
        } else {
            ObservationSupport::OffSupport
        }
    }

    /// Slice of the joint law at `y`: the atomic slice when `Pr(Y = y) > 0`,
    /// otherwise the density slice.
    pub fn slice(&self, y: f64) -> MixedMeasure {
        match self.find_atomic(y) {
            Some(s) => s.clone(),
            None => self.density_slice(y),
        }
    }

    /// `x ↦ (joint density of (x, y))` as a sub-measure on the state space.
    pub fn density_slice(&self, y: f64) -> MixedMeasure {
        let domain = self.prior.domain();
        let mut atoms = Vec::new();
        let mut pieces = Vec::new();
        for c in self.channel.components() {
            let w = c.weight;
            match &c.kind {
                ChannelKind::Identity => {
                    let d = self.prior.density_at(y);
                    if d > 0.0 {
                        atoms.push(Atom { loc: y, weight: w * d });
                    }
                }
                ChannelKind::UniformNoise { lo, hi } => {
                    if y >= *lo && y < *hi {
                        let s = w / (hi - lo);
                        atoms.extend(self.prior.atoms().iter().map(|a| Atom {
                            loc: a.loc,
                            weight: a.weight * s,
                        }));
                        pieces.extend(self.prior.pieces().iter().map(|p| p.scaled(s)));
                    }
                }
                ChannelKind::Additive(eta) => {
                    for e in eta.pieces() {
                        let (from, to) = self.atom_window(y, e);
                        for a in &self.prior.atoms()[from..to] {
                            let like = e.density.eval(y - a.loc);
                            atoms.push(Atom {
                                loc: a.loc,
                                weight: w * a.weight * like,
                            });
                        }
                        let shifted = e.density.compose_affine(y, -1.0);
                        for p in self.prior.pieces() {
                            let lo = p.lo.max(y - e.hi);
                            let hi = p.hi.min(y - e.lo);
                            if hi > lo {
                                pieces.push(Piece::new(lo, hi, p.density.mul(&shifted).scale(w)));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        MixedMeasure::raw(domain, atoms, sum_overlapping(pieces))
    }

    /// Prior atoms whose shift lands in the noise piece: `y - x ∈ [e.lo, e.hi)`.
    fn atom_window(&self, y: f64, e: &Piece) -> (usize, usize) {
        let from = self.atom_locs.partition_point(|&x| x <= y - e.hi);
        let to = self.atom_locs.partition_point(|&x| x <= y - e.lo);
        (from, to.max(from))
    }

    /// `[∫ s(dx), ∫ x s(dx), ∫ x² s(dx)]` for the density slice `s` at `y`.
    /// Equal to `density_slice(y)` moments without building the slice.
    pub fn density_moments(&self, y: f64) -> [f64; 3] {
        let mut m = [0.0; 3];
        for c in self.channel.components() {
            let w = c.weight;
            match &c.kind {
                ChannelKind::Identity => {
                    let d = self.prior.density_at(y);
                    if d > 0.0 {
                        m[0] += w * d;
                        m[1] += w * d * y;
                        m[2] += w * d * y * y;
                    }
                }
                ChannelKind::UniformNoise { lo, hi } => {
                    if y >= *lo && y < *hi {
                        let s = w / (hi - lo);
                        for j in 0..3 {
                            m[j] += s * self.prior_moments[j];
                        }
                    }
                }
                ChannelKind::Additive(eta) => {
                    for e in eta.pieces() {
                        let (from, to) = self.atom_window(y, e);
                        if to > from {
                            let q = e.density.coeffs();
                            for (j, slot) in m.iter_mut().enumerate() {
                                // Σ a x^j q(y - x) = Σ_k q_k Σ_l C(k,l) y^{k-l} (-x)^l x^j
                                let mut acc = 0.0;
                                for (k, &qk) in q.iter().enumerate() {
                                    for l in 0..=k {
                                        let s = self.prefix[j + l][to] - self.prefix[j + l][from];
                                        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                                        acc += qk * binomial(k, l) * y.powi((k - l) as i32) * sign * s;
                                    }
                                }
                                *slot += w * acc;
                            }
                        }
                        if !self.prior.pieces().is_empty() {
                            let shifted = e.density.compose_affine(y, -1.0);
                            for p in self.prior.pieces() {
                                let lo = p.lo.max(y - e.hi);
                                let hi = p.hi.min(y - e.lo);
                                if hi > lo {
                                    let base = p.density.mul(&shifted);
                                    for (j, slot) in m.iter_mut().enumerate() {
                                        *slot += w * base.mul(&Poly::monomial(j)).integral(lo, hi);
                                    }
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        m
    }

    /// Moments of the slice at `y`, atomic or density.
    pub fn slice_moments(&self, y: f64) -> [f64; 3] {
        match self.find_atomic(y) {
            Some(s) => [s.moment(0), s.moment(1), s.moment(2)],
            None => self.density_moments(y),
        }
    }

    /// Bayes posterior at `y`; the prior itself when `y` is off-support.
    pub fn posterior(&self, y: f64) -> Result<MixedMeasure> {
        let s = self.slice(y);
        let mass = s.mass();
        if mass > DENSITY_FLOOR || (self.find_atomic(y).is_some() && mass > 0.0) {
            s.normalized()
        } else {
            Ok(self.prior.clone())
        }
    }

    /// Posterior mean `E[X | Y = y]`, with the prior mean off-support.
    pub fn posterior_mean(&self, y: f64) -> f64 {
        let m = self.slice_moments(y);
        if m[0] > DENSITY_FLOOR || (m[0] > 0.0 && self.find_atomic(y).is_some()) {
            m[1] / m[0]
        } else {
            self.prior_moments[1] / self.prior_moments[0]
        }
    }

    /// The marginal law of `Y`.
    pub fn marginal(&self) -> Result<MixedMeasure> {
        let atoms: Vec<Atom> = self
            .atomic
            .iter()
            .map(|(y, s)| Atom { loc: *y, weight: s.mass() })
            .collect();
        let mut pieces = Vec::new();
        for c in self.channel.components() {
            let w = c.weight;
            match &c.kind {
                ChannelKind::Identity => pieces.extend(self.prior.pieces().iter().map(|p| p.scaled(w))),
                ChannelKind::UniformNoise { lo, hi } => {
                    pieces.push(Piece::new(*lo, *hi, Poly::constant(w / (hi - lo))))
                }
                ChannelKind::Additive(eta) => {
                    for a in self.prior.atoms() {
                        pieces.extend(eta.pieces().iter().map(|e| {
                            Piece::new(
                                e.lo + a.loc,
                                e.hi + a.loc,
                                e.density.compose_affine(-a.loc, 1.0).scale(w * a.weight),
                            )
                        }));
                    }
                    for p in self.prior.pieces() {
                        for e in eta.pieces() {
                            pieces.extend(convolve_pieces(p, e).into_iter().map(|c| c.scaled(w)));
                        }
                    }
                }
                _ => {}
            }
        }
        MixedMeasure::new(self.obs_domain, atoms, sum_overlapping(pieces))
    }
}

/// Atomic slices keyed by observation value, merged and sorted.
fn atomic_slices(prior: &MixedMeasure, channel: &Channel) -> Vec<(f64, MixedMeasure)> {
    let domain = prior.domain();
    let mut raw: Vec<(f64, MixedMeasure)> = Vec::new();
    for c in channel.components() {
        let w = c.weight;
        if w == 0.0 {
            continue;
        }
        match &c.kind {
            ChannelKind::Identity => {
                for a in prior.atoms() {
                    raw.push((
                        a.loc,
                        MixedMeasure::raw(
                            domain,
                            vec![Atom {
                                loc: a.loc,
                                weight: w * a.weight,
                            }],
                            Vec::new(),
                        ),
                    ));
                }
            }
            ChannelKind::Constant(y0) => raw.push((*y0, prior.scaled(w))),
            ChannelKind::Quantizer(q) => {
                for i in 0..q.cells() {
                    let (lo, hi, closed) = q.cell(i);
                    raw.push((i as f64, prior.restrict(lo, hi, closed).scaled(w)));
                }
            }
            _ => {}
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, MixedMeasure)> = Vec::new();
    for (y, s) in raw {
        match merged.last_mut() {
            Some((v, acc)) if (y - *v).abs() <= ATOM_MERGE_TOL => *acc = acc.plus(&s),
            _ => merged.push((y, s)),
        }
    }
    merged.retain(|(_, s)| s.mass() > 0.0);
    merged
}

/// Exact convolution of two polynomial pieces, as pieces in `y = x + w`.
pub(crate) fn convolve_pieces(p: &Piece, e: &Piece) -> Vec<Piece> {
    let (a, b, c, d) = (p.lo, p.hi, e.lo, e.hi);
    let pc = p.density.coeffs();
    let qc = e.density.coeffs();
    if pc.is_empty() || qc.is_empty() {
        return Vec::new();
    }
    // p(x) q(y - x) = Σ k[m][n] x^m y^n
    let max_m = pc.len() + qc.len();
    let mut k = vec![vec![0.0; qc.len()]; max_m];
    for (i, &pi) in pc.iter().enumerate() {
        for (kk, &qk) in qc.iter().enumerate() {
            for l in 0..=kk {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                k[i + l][kk - l] += pi * qk * binomial(kk, l) * sign;
            }
        }
    }
    let mut knots = vec![a + c, a + d, b + c, b + d];
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (s, t) = (w[0], w[1]);
        if t <= s {
            continue;
        }
        let mid = 0.5 * (s + t);
        let lower = if mid - d > a { Poly::linear(-d, 1.0) } else { Poly::constant(a) };
        let upper = if mid - c < b { Poly::linear(-c, 1.0) } else { Poly::constant(b) };
        let mut g = Poly::zero();
        for (m, row) in k.iter().enumerate() {
            if row.iter().all(|&v| v == 0.0) {
                continue;
            }
            let span = upper.pow(m + 1).sub(&lower.pow(m + 1)).scale(1.0 / (m as f64 + 1.0));
            let ypoly = Poly::new(row.clone());
            g = g.add(&span.mul(&ypoly));
        }
        if !g.is_zero() {
            out.push(Piece::new(s, t, g));
        }
    }
    out
}
