//! Total variation between joint laws `pQ` and `p'Q` on `X × Y`.
//!
//! The joint law of a mixed prior through a mixture channel is a sum of
//! components of five mutually singular types: point masses `(x, y)`,
//! densities in `x` on horizontal lines `y = const`, a density on the
//! diagonal `y = x`, densities in `y` on vertical lines `x = const`, and a
//! planar density. The TV norm of a difference is the sum over types, and
//! within each type components with the same carrier are combined first.

use super::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::measures::metrics::{abs_mass, density_difference};
use crate::measures::{total_variation, MixedMeasure, Piece, ATOM_MERGE_TOL};

/// Largest number of joint components enumerated before giving up.
pub const JOINT_COMPONENT_LIMIT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointTvReport {
    /// `‖pQ − p'Q‖_TV`
    pub lhs: f64,
    /// `‖p − p'‖_TV`
    pub rhs: f64,
    pub pass: bool,
}

/// Compares `‖pQ − p'Q‖_TV` with `‖p − p'‖_TV`; they agree to `1e-9`.
pub fn joint_tv_identity_check(p: &MixedMeasure, p_prime: &MixedMeasure, q: &Channel) -> Result<JointTvReport> {
    let rhs = total_variation(p, p_prime)?;
    if !p.domain().same_as(&q.input_domain()) {
        return Err(Error::Domain("prior and channel input domains differ".into()));
    }
    check_size(p, p_prime, q)?;
    let lhs = joint_tv(p, p_prime, q).min(2.0);
    Ok(JointTvReport {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= 1e-9,
    })
}

fn check_size(p: &MixedMeasure, p_prime: &MixedMeasure, q: &Channel) -> Result<()> {
    let atoms = p.atoms().len() + p_prime.atoms().len();
    let pieces = p.pieces().len() + p_prime.pieces().len();
    let mut count = 0usize;
    for c in q.components() {
        count += match &c.kind {
            ChannelKind::Additive(eta) => (atoms + pieces) * eta.pieces().len(),
            ChannelKind::Quantizer(qz) => (atoms + pieces) * qz.cells(),
            _ => atoms + pieces,
        };
    }
    if count > JOINT_COMPONENT_LIMIT {
        return Err(Error::Capability(format!(
            "joint law has {count} components, above the enumeration limit {JOINT_COMPONENT_LIMIT}"
        )));
    }
    Ok(())
}

/// Signed joint components of `pQ - p'Q`, grouped by carrier type.
#[derive(Default)]
struct JointDifference {
    points: Vec<((f64, f64), f64)>,
    lines: Vec<(f64, Piece)>,
    diagonal: Vec<Piece>,
    vertical: Vec<(f64, f64)>,
    planar: Vec<Piece>,
    // total weight of the y-densities attached to vertical and planar parts
    fibre_mass: f64,
}

impl JointDifference {
    fn add(&mut self, m: &MixedMeasure, sign: f64, q: &Channel) {
        for c in q.components() {
            let w = sign * c.weight;
            match &c.kind {
                ChannelKind::Identity => {
                    self.points.extend(m.atoms().iter().map(|a| ((a.loc, a.loc), w * a.weight)));
                    self.diagonal.extend(m.pieces().iter().map(|pc| pc.scaled(w)));
                }
                ChannelKind::Constant(y0) => {
                    self.points.extend(m.atoms().iter().map(|a| ((a.loc, *y0), w * a.weight)));
                    self.lines.extend(m.pieces().iter().map(|pc| (*y0, pc.scaled(w))));
                }
                ChannelKind::Quantizer(qz) => {
                    self.points
                        .extend(m.atoms().iter().map(|a| ((a.loc, qz.label(a.loc) as f64), w * a.weight)));
                    for i in 0..qz.cells() {
                        let (lo, hi, closed) = qz.cell(i);
                        let cell = m.restrict(lo, hi, closed);
                        self.lines.extend(cell.pieces().iter().map(|pc| (i as f64, pc.scaled(w))));
                    }
                }
                ChannelKind::UniformNoise { .. } | ChannelKind::Additive(_) => {}
            }
        }
        // Every conditional y-density is nonnegative, so along the fibre over x
        // the difference is Δp(x) times a density of total mass `fibre`.
        let fibre: f64 = q.components().iter().filter(|c| c.kind.has_density()).map(|c| c.weight).sum();
        if fibre > 0.0 {
            self.vertical.extend(m.atoms().iter().map(|a| (a.loc, sign * a.weight)));
            self.planar.extend(m.pieces().iter().map(|pc| pc.scaled(sign)));
            self.fibre_mass = fibre;
        }
    }

    fn norm(mut self) -> f64 {
        self.points.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));
        let mut points = 0.0;
        let mut i = 0;
        while i < self.points.len() {
            let ((x, y), mut acc) = self.points[i];
            let mut j = i + 1;
            while j < self.points.len()
                && (self.points[j].0 .0 - x).abs() <= ATOM_MERGE_TOL
                && (self.points[j].0 .1 - y).abs() <= ATOM_MERGE_TOL
            {
                acc += self.points[j].1;
                j += 1;
            }
            points += acc.abs();
            i = j;
        }

        self.lines.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut lines = 0.0;
        let mut i = 0;
        while i < self.lines.len() {
            let y = self.lines[i].0;
            let mut group = Vec::new();
            while i < self.lines.len() && (self.lines[i].0 - y).abs() <= ATOM_MERGE_TOL {
                group.push(self.lines[i].1.clone());
                i += 1;
            }
            lines += abs_mass(&density_difference(&group, &[]));
        }

        let diagonal = abs_mass(&density_difference(&self.diagonal, &[]));

        self.vertical.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vertical = 0.0;
        let mut i = 0;
        while i < self.vertical.len() {
            let (x, mut acc) = self.vertical[i];
            let mut j = i + 1;
            while j < self.vertical.len() && (self.vertical[j].0 - x).abs() <= ATOM_MERGE_TOL {
                acc += self.vertical[j].1;
                j += 1;
            }
            vertical += acc.abs();
            i = j;
        }
        let planar = abs_mass(&density_difference(&self.planar, &[]));

        points + lines + diagonal + self.fibre_mass * (vertical + planar)
    }
}

fn joint_tv(p: &MixedMeasure, p_prime: &MixedMeasure, q: &Channel) -> f64 {
    let mut diff = JointDifference::default();
    diff.add(p, 1.0, q);
    diff.add(p_prime, -1.0, q);
    diff.norm()
}
