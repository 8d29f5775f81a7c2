//! Exact distances between mixed measures.

use super::poly::Poly;
use super::{sort_dedup, sum_overlapping, Atom, Interval, MixedMeasure, Piece, ATOM_MERGE_TOL};
use crate::error::{Error, Result};

fn check_same_domain(p: &MixedMeasure, q: &MixedMeasure) -> Result<Interval> {
    if !p.domain().same_as(&q.domain()) {
        return Err(Error::Domain(format!(
            "[{}, {}] vs [{}, {}]",
            p.domain().lo,
            p.domain().hi,
            q.domain().lo,
            q.domain().hi
        )));
    }
    Ok(p.domain())
}

/// Signed atom differences `w_p(x) - w_q(x)` on the union of atom locations.
pub(crate) fn atom_differences(p: &[Atom], q: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(p.len() + q.len());
    let (mut i, mut j) = (0, 0);
    while i < p.len() || j < q.len() {
        let take_p = j >= q.len() || (i < p.len() && p[i].loc < q[j].loc - ATOM_MERGE_TOL);
        let take_q = i >= p.len() || (j < q.len() && q[j].loc < p[i].loc - ATOM_MERGE_TOL);
        if take_p {
            out.push(p[i]);
            i += 1;
        } else if take_q {
            out.push(Atom {
                loc: q[j].loc,
                weight: -q[j].weight,
            });
            j += 1;
        } else {
            out.push(Atom {
                loc: p[i].loc,
                weight: p[i].weight - q[j].weight,
            });
            i += 1;
            j += 1;
        }
    }
    out
}

/// Disjoint pieces of `density_p - density_q`.
pub(crate) fn density_difference(p: &[Piece], q: &[Piece]) -> Vec<Piece> {
    let mut all: Vec<Piece> = p.to_vec();
    all.extend(q.iter().map(|x| x.scaled(-1.0)));
    sum_overlapping(all)
}

/// `∫ |f|` for disjoint signed pieces.
pub(crate) fn abs_mass(pieces: &[Piece]) -> f64 {
    pieces.iter().map(|p| p.density.abs_integral(p.lo, p.hi)).sum()
}

/// Total variation norm `2 sup_B |p(B) - q(B)|`, i.e. the L1 distance of the
/// two measures: atom weight differences plus `∫ |density_p - density_q|`.
pub fn total_variation(p: &MixedMeasure, q: &MixedMeasure) -> Result<f64> {
    check_same_domain(p, q)?;
    let atoms: f64 = atom_differences(p.atoms(), q.atoms())
        .iter()
        .map(|a| a.weight.abs())
        .sum();
    let dens = abs_mass(&density_difference(p.pieces(), q.pieces()));
    Ok((atoms + dens).min(2.0))
}

/// The CDF difference `F_p - F_q` as a polynomial on each segment between
/// consecutive breakpoints. Segments cover the whole domain.
struct CdfDifference {
    segments: Vec<Piece>,
}

impl CdfDifference {
    fn new(p: &MixedMeasure, q: &MixedMeasure, domain: Interval) -> Self {
        let atoms = atom_differences(p.atoms(), q.atoms());
        let dens = density_difference(p.pieces(), q.pieces());

        let mut knots = vec![domain.lo, domain.hi];
        knots.extend(atoms.iter().map(|a| a.loc));
        for d in &dens {
            knots.push(d.lo);
            knots.push(d.hi);
        }
        sort_dedup(&mut knots);

        let mut segments = Vec::with_capacity(knots.len());
        let mut level = 0.0;
        let (mut ai, mut di) = (0, 0);
        for w in knots.windows(2) {
            let (l, r) = (w[0], w[1]);
            while ai < atoms.len() && atoms[ai].loc <= l + ATOM_MERGE_TOL {
                level += atoms[ai].weight;
                ai += 1;
            }
            while di < dens.len() && dens[di].hi <= l + ATOM_MERGE_TOL {
                di += 1;
            }
            let density = match dens.get(di) {
                Some(d) if d.lo <= l + ATOM_MERGE_TOL => d.density.clone(),
                _ => Poly::zero(),
            };
            let anti = density.antiderivative();
            let poly = anti.add(&Poly::constant(level - anti.eval(l)));
            level += density.integral(l, r);
            segments.push(Piece::new(l, r, poly));
        }
        CdfDifference { segments }
    }

    fn abs_integral(&self) -> f64 {
        abs_mass(&self.segments)
    }

    /// `∫ (F_p - F_q)` over each of `cells` consecutive equal cells of `domain`.
    fn cell_integrals(&self, domain: Interval, cells: usize) -> Vec<f64> {
        let h = domain.length() / cells as f64;
        let edge = |k: usize| if k == cells { domain.hi } else { domain.lo + h * k as f64 };
        let mut out = vec![0.0; cells];
        let mut s = 0;
        for (k, slot) in out.iter_mut().enumerate() {
            let (cl, cr) = (edge(k), edge(k + 1));
            while s < self.segments.len() && self.segments[s].hi <= cl {
                s += 1;
            }
            let mut t = s;
            while t < self.segments.len() && self.segments[t].lo < cr {
                let seg = &self.segments[t];
                *slot += seg.density.integral(seg.lo.max(cl), seg.hi.min(cr));
                t += 1;
            }
        }
        out
    }
}

/// Wasserstein-1 distance, via the one-dimensional identity `∫ |F_p - F_q|`.
pub fn wasserstein1(p: &MixedMeasure, q: &MixedMeasure) -> Result<f64> {
    let domain = check_same_domain(p, q)?;
    if !domain.is_bounded() {
        return Err(Error::Unsupported("Wasserstein distance on an unbounded domain".into()));
    }
    Ok(CdfDifference::new(p, q, domain).abs_integral())
}

/// Bounded-Lipschitz surrogate for weak convergence.
///
/// Maximizes `|∫ f dp - ∫ f dq|` over a finite family of 1-Lipschitz functions
/// with `|f| ≤ 1`, all piecewise linear on a grid of `mesh` equal cells:
/// ramps with unit slope over any run of cells of total length ≤ 2, and
/// symmetric tents of height ≤ 2 (both centred so that `|f| ≤ 1`). Integrals
/// are evaluated exactly through `∫ f d(p - q) = -∫ f' (F_p - F_q)`. The
/// family for `2m` cells contains the one for `m` cells.
pub fn bounded_lipschitz_distance(p: &MixedMeasure, q: &MixedMeasure, mesh: usize) -> Result<f64> {
    let domain = check_same_domain(p, q)?;
    if mesh < 2 {
        return Err(Error::Argument(format!("mesh must be at least 2, got {mesh}")));
    }
    if !domain.is_bounded() {
        return Err(Error::Unsupported("bounded-Lipschitz distance on an unbounded domain".into()));
    }
    if domain.length() == 0.0 {
        return Ok(0.0);
    }
    let cells = CdfDifference::new(p, q, domain).cell_integrals(domain, mesh);
    let mut prefix = Vec::with_capacity(mesh + 1);
    prefix.push(0.0);
    for c in &cells {
        prefix.push(prefix.last().unwrap() + c);
    }
    let h = domain.length() / mesh as f64;
    let max_run = ((2.0 / h) * (1.0 + 1e-12)).floor().max(1.0) as usize;

    let mut best: f64 = 0.0;
    for i in 0..mesh {
        let far = (i + max_run).min(mesh);
        for j in (i + 1)..=far {
            best = best.max((prefix[j] - prefix[i]).abs());
        }
        for half in 1..=max_run {
            let j = i + 2 * half;
            if j > mesh {
                break;
            }
            let k = i + half;
            best = best.max((2.0 * prefix[k] - prefix[i] - prefix[j]).abs());
        }
    }
    Ok(best)
}
