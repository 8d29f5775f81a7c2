//! Probability measures on a real interval: finitely many atoms plus a
//! piecewise-polynomial density.
//!
//! Every prior, marginal and posterior in the laboratory is a
//! [`MixedMeasure`]. The same container is also used, unnormalized, for
//! posterior "slices" (the joint measure restricted to one observation), which
//! is why a handful of constructors skip the unit-mass check.

pub mod metrics;
pub mod poly;
pub mod sample;
pub mod text;

pub use metrics::{bounded_lipschitz_distance, total_variation, wasserstein1};
pub use poly::Poly;
pub use sample::{empirical_measure, sample, Rng};

use crate::error::{Error, Result};

/// Atoms closer than this are the same atom.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-9;
/// Allowed negative excursion of a density.
pub const DENSITY_TOL: f64 = 1e-12;

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::invalid("interval", format!("[{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - ATOM_MERGE_TOL && x <= self.hi + ATOM_MERGE_TOL
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn same_as(&self, other: &Interval) -> bool {
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= ATOM_MERGE_TOL;
        close(self.lo, other.lo) && close(self.hi, other.hi)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub loc: f64,
    pub weight: f64,
}

/// Density `density(x)` on the half-open interval `[lo, hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub density: Poly,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, density: Poly) -> Self {
        Piece { lo, hi, density }
    }

    pub fn mass(&self) -> f64 {
        self.density.integral(self.lo, self.hi)
    }

    pub fn scaled(&self, s: f64) -> Piece {
        Piece::new(self.lo, self.hi, self.density.scale(s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedMeasure {
    domain: Interval,
    atoms: Vec<Atom>,
    pieces: Vec<Piece>,
}

impl MixedMeasure {
    /// Builds a probability measure, checking every invariant.
    pub fn new(domain: Interval, atoms: Vec<Atom>, pieces: Vec<Piece>) -> Result<Self> {
        let m = Self::from_parts(domain, atoms, pieces)?;
        m.check_probability()?;
        Ok(m)
    }

    /// Canonicalizes layout (sorted, merged atoms; sorted pieces) and checks
    /// signs and placement, but not the total mass.
    pub fn from_parts(domain: Interval, atoms: Vec<Atom>, pieces: Vec<Piece>) -> Result<Self> {
        let atoms = merge_atoms(atoms);
        let mut pieces: Vec<Piece> = pieces
            .into_iter()
            .filter(|p| p.hi > p.lo && !p.density.is_zero())
            .collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for a in &atoms {
            if a.weight < 0.0 || !a.weight.is_finite() {
                return Err(Error::invalid("measure", format!("atom weight {} at {}", a.weight, a.loc)));
            }
            if !domain.contains(a.loc) {
                return Err(Error::invalid("measure", format!("atom {} outside domain", a.loc)));
            }
        }
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi - ATOM_MERGE_TOL {
                return Err(Error::invalid(
                    "measure",
                    format!("pieces [{}, {}) and [{}, {}) overlap", w[0].lo, w[0].hi, w[1].lo, w[1].hi),
                ));
            }
        }
        for p in &pieces {
            if !domain.contains(p.lo) || !domain.contains(p.hi) {
                return Err(Error::invalid("measure", format!("piece [{}, {}) outside domain", p.lo, p.hi)));
            }
            let min = p.density.min_on(p.lo, p.hi);
            if min < -DENSITY_TOL {
                return Err(Error::invalid(
                    "measure",
                    format!("density reaches {min} on [{}, {})", p.lo, p.hi),
                ));
            }
        }
        Ok(MixedMeasure { domain, atoms, pieces })
    }

    /// Unchecked constructor for internal sub-measures whose parts are already
    /// canonical or whose signs are deliberately arbitrary.
    pub(crate) fn raw(domain: Interval, atoms: Vec<Atom>, pieces: Vec<Piece>) -> Self {
        let atoms = merge_atoms(atoms);
        let mut pieces: Vec<Piece> = pieces.into_iter().filter(|p| p.hi > p.lo && !p.density.is_zero()).collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        MixedMeasure { domain, atoms, pieces }
    }


    pub fn dirac(domain: Interval, x: f64) -> Result<Self> {
        Self::new(domain, vec![Atom { loc: x, weight: 1.0 }], Vec::new())
    }

    /// Finitely supported law from `(location, weight)` pairs.
    pub fn discrete(domain: Interval, points: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            domain,
            points.iter().map(|&(loc, weight)| Atom { loc, weight }).collect(),
            Vec::new(),
        )
    }

    /// Uniform law on `[lo, hi]` inside `domain`.
    pub fn uniform(domain: Interval, lo: f64, hi: f64) -> Result<Self> {
        if hi <= lo {
            return Err(Error::Argument(format!("uniform on [{lo}, {hi}]")));
        }
        Self::new(domain, Vec::new(), vec![Piece::new(lo, hi, Poly::constant(1.0 / (hi - lo)))])
    }

    /// Piecewise-constant density from `(lo, hi, value)` triples.
    pub fn piecewise_constant(domain: Interval, steps: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            domain,
            Vec::new(),
            steps.iter().map(|&(lo, hi, v)| Piece::new(lo, hi, Poly::constant(v))).collect(),
        )
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_atomic(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn with_domain(&self, domain: Interval) -> Result<Self> {
        Self::new(domain, self.atoms.clone(), self.pieces.clone())
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn density_mass(&self) -> f64 {
        self.pieces.iter().map(Piece::mass).sum()
    }

    pub fn mass(&self) -> f64 {
        self.atom_mass() + self.density_mass()
    }

    /// `∫ x^k dμ`
    pub fn moment(&self, k: usize) -> f64 {
        self.integrate(&Poly::monomial(k))
    }

    pub fn mean(&self) -> f64 {
        self.moment(1) / self.mass()
    }

    /// `∫ f dμ` for a polynomial `f`.
    pub fn integrate(&self, f: &Poly) -> f64 {
        let a: f64 = self.atoms.iter().map(|a| a.weight * f.eval(a.loc)).sum();
        let d: f64 = self.pieces.iter().map(|p| p.density.mul(f).integral(p.lo, p.hi)).sum();
        a + d
    }

    /// Density value at `x` (pieces are half-open, `[lo, hi)`).
    pub fn density_at(&self, x: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.hi <= x);
        match self.pieces.get(idx) {
            Some(p) if p.lo <= x && x < p.hi => p.density.eval(x),
            _ => 0.0,
        }
    }

    pub fn atom_weight_at(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|a| a.loc < x - ATOM_MERGE_TOL);
        match self.atoms.get(idx) {
            Some(a) if (a.loc - x).abs() <= ATOM_MERGE_TOL => a.weight,
            _ => 0.0,
        }
    }

    /// `μ((-∞, t])`
    pub fn cdf(&self, t: f64) -> f64 {
        let a: f64 = self.atoms.iter().take_while(|a| a.loc <= t).map(|a| a.weight).sum();
        let d: f64 = self
            .pieces
            .iter()
            .take_while(|p| p.lo < t)
            .map(|p| p.density.integral(p.lo, p.hi.min(t)))
            .sum();
        a + d
    }

    /// Restriction to `[lo, hi)` (or `[lo, hi]` when `closed_hi`).
    pub fn restrict(&self, lo: f64, hi: f64, closed_hi: bool) -> MixedMeasure {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| a.loc >= lo && (a.loc < hi || (closed_hi && a.loc <= hi)))
            .copied()
            .collect();
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let (a, b) = (p.lo.max(lo), p.hi.min(hi));
                (b > a).then(|| Piece::new(a, b, p.density.clone()))
            })
            .collect();
        MixedMeasure {
            domain: self.domain,
            atoms,
            pieces,
        }
    }

    pub fn scaled(&self, s: f64) -> MixedMeasure {
        MixedMeasure {
            domain: self.domain,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    loc: a.loc,
                    weight: a.weight * s,
                })
                .collect(),
            pieces: self.pieces.iter().map(|p| p.scaled(s)).collect(),
        }
    }

    /// Sum of two (sub-)measures on the same domain.
    pub fn plus(&self, other: &MixedMeasure) -> MixedMeasure {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        MixedMeasure::raw(self.domain.hull(&other.domain), atoms, sum_overlapping(pieces))
    }

    /// Validates, then rescales to unit mass. The density tolerance applies
    /// before rescaling, so rounding in a light slice is not magnified.
    pub fn normalized(&self) -> Result<MixedMeasure> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(Error::invalid("measure", "cannot normalize a null measure"));
        }
        let checked = MixedMeasure::from_parts(self.domain, self.atoms.clone(), self.pieces.clone())?;
        Ok(checked.scaled(1.0 / m))
    }

    /// Every location at which the measure changes form.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.atoms.iter().map(|a| a.loc).collect();
        for p in &self.pieces {
            b.push(p.lo);
            b.push(p.hi);
        }
        sort_dedup(&mut b);
        b
    }

    fn check_probability(&self) -> Result<()> {
        let m = self.mass();
        if (m - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid("measure", format!("total mass {m} differs from 1")));
        }
        Ok(())
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.retain(|a| a.weight != 0.0);
    atoms.sort_by(|a, b| a.loc.total_cmp(&b.loc));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if (a.loc - last.loc).abs() <= ATOM_MERGE_TOL => last.weight += a.weight,
            _ => out.push(a),
        }
    }
    out
}

/// Sorts and removes values within [`ATOM_MERGE_TOL`] of their predecessor.
pub(crate) fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|b, a| (*b - *a).abs() <= ATOM_MERGE_TOL);
}

/// Resolves possibly overlapping pieces into disjoint sorted pieces whose
/// densities are the sums of the overlapping inputs.
pub(crate) fn sum_overlapping(mut pieces: Vec<Piece>) -> Vec<Piece> {
    pieces.retain(|p| p.hi > p.lo && !p.density.is_zero());
    if pieces.is_empty() {
        return pieces;
    }
    let mut knots: Vec<f64> = pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));

    let mut out = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut next = 0;
    for w in knots.windows(2) {
        let (l, r) = (w[0], w[1]);
        while next < pieces.len() && pieces[next].lo <= l {
            active.push(next);
            next += 1;
        }
        active.retain(|&i| pieces[i].hi > l);
        if active.is_empty() {
            continue;
        }
        let poly = active
            .iter()
            .fold(Poly::zero(), |acc, &i| acc.add(&pieces[i].density));
        if !poly.is_zero() {
            out.push(Piece::new(l, r, poly));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::unit()
    }

    #[test]
    fn rejects_bad_mass() {
        let err = MixedMeasure::discrete(unit(), &[(0.0, 0.5), (1.0, 0.4)]).unwrap_err();
        assert!(matches!(err, Error::Invalid { .. }));
    }

    #[test]
    fn rejects_negative_density() {
        // 2 - 3x on [0, 1) carries mass 1/2 but falls to -1.
        let p = Piece::new(0.0, 1.0, Poly::linear(2.0, -3.0));
        assert!(MixedMeasure::new(unit(), vec![Atom { loc: 0.5, weight: 0.5 }], vec![p]).is_err());
    }

    #[test]
    fn merges_close_atoms() {
        let m = MixedMeasure::discrete(unit(), &[(0.5, 0.25), (0.5 + 1e-13, 0.25), (1.0, 0.5)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atom_weight_at(0.5), 0.5);
    }

    #[test]
    fn moments_of_mixed_law() {
        // ½δ_0 + ½·U[0,1]: mean 1/4, second moment 1/6.
        let m = MixedMeasure::new(
            unit(),
            vec![Atom { loc: 0.0, weight: 0.5 }],
            vec![Piece::new(0.0, 1.0, Poly::constant(0.5))],
        )
        .unwrap();
        assert!((m.mean() - 0.25).abs() < 1e-15);
        assert!((m.moment(2) - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((m.cdf(0.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn restrict_and_plus() {
        let m = MixedMeasure::uniform(unit(), 0.0, 1.0).unwrap();
        let left = m.restrict(0.0, 0.5, false);
        let right = m.restrict(0.5, 1.0, true);
        assert!((left.mass() - 0.5).abs() < 1e-15);
        let back = left.plus(&right);
        assert!((back.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlapping_pieces_sum() {
        let out = sum_overlapping(vec![
            Piece::new(0.0, 1.0, Poly::constant(1.0)),
            Piece::new(0.5, 2.0, Poly::constant(2.0)),
        ]);
        assert_eq!(out.len(), 3);
        assert_eq!(out[1].density, Poly::constant(3.0));
        assert_eq!((out[2].lo, out[2].hi), (1.0, 2.0));
    }
}
