#![allow(dead_code)]

use priorlab::channels::{Channel, ChannelKind, Component, NoiseDensity, Quantizer};
use priorlab::measures::{Atom, Interval, MixedMeasure, Piece, Poly};
use proptest::prelude::*;

pub fn unit() -> Interval {
    Interval::unit()
}

/// Atoms plus piecewise-linear density cells on `[0, 1]`, scaled to unit mass.
pub fn build_measure(atoms: &[(f64, f64)], cells: &[(f64, f64)], density_share: f64) -> Option<MixedMeasure> {
    let atom_total: f64 = atoms.iter().map(|a| a.1).sum();
    let k = cells.len() as f64;
    let cell_total: f64 = cells.iter().map(|&(a, b)| 0.5 * (a + b) / k).sum();
    let share = match (atom_total > 0.0, cell_total > 1e-3) {
        (false, false) => return None,
        (true, false) => 0.0,
        (false, true) => 1.0,
        (true, true) => density_share.clamp(0.05, 0.95),
    };
    let atoms: Vec<Atom> = atoms
        .iter()
        .map(|&(loc, w)| Atom {
            loc,
            weight: w / atom_total * (1.0 - share),
        })
        .collect();
    let pieces: Vec<Piece> = if share > 0.0 {
        cells
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let (lo, hi) = (i as f64 / k, (i + 1) as f64 / k);
                let s = share / cell_total;
                let slope = (b - a) * s / (hi - lo);
                Piece::new(lo, hi, Poly::linear(a * s - slope * lo, slope))
            })
            .collect()
    } else {
        Vec::new()
    };
    MixedMeasure::new(unit(), atoms, pieces).ok()
}

pub fn measure() -> impl Strategy<Value = MixedMeasure> {
    (
        prop::collection::vec((0.0..=1.0f64, 0.05..1.0f64), 0..4),
        prop::collection::vec((0.0..2.0f64, 0.0..2.0f64), 0..5),
        0.0..1.0f64,
    )
        .prop_filter_map("no mass", |(atoms, cells, share)| build_measure(&atoms, &cells, share))
}

pub fn atomic_measure() -> impl Strategy<Value = MixedMeasure> {
    prop::collection::vec((0.0..=1.0f64, 0.05..1.0f64), 1..5)
        .prop_filter_map("no mass", |atoms| build_measure(&atoms, &[], 0.0))
}

pub fn kind(density_only: bool) -> BoxedStrategy<ChannelKind> {
    let dens = prop_oneof![
        (0.0..0.5f64, 0.1..1.0f64).prop_map(|(lo, w)| ChannelKind::UniformNoise { lo, hi: lo + w }),
        (0.05..0.5f64).prop_map(|h| ChannelKind::Additive(NoiseDensity::triangular(h).unwrap())),
    ];
    if density_only {
        return dens.boxed();
    }
    prop_oneof![
        Just(ChannelKind::Identity),
        (0.0..=1.0f64).prop_map(ChannelKind::Constant),
        prop::collection::vec(0.05..0.95f64, 1..4).prop_map(|mut inner| {
            inner.sort_by(f64::total_cmp);
            inner.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let mut b = vec![0.0];
            b.extend(inner);
            b.push(1.0);
            ChannelKind::Quantizer(Quantizer::new(b).unwrap())
        }),
        dens,
    ]
    .boxed()
}

pub fn channel(density_only: bool) -> impl Strategy<Value = Channel> {
    prop::collection::vec((kind(density_only), 0.1..1.0f64), 1..3).prop_map(|parts| {
        let total: f64 = parts.iter().map(|p| p.1).sum();
        let mut comps: Vec<Component> = parts
            .into_iter()
            .map(|(kind, w)| Component { weight: w / total, kind })
            .collect();
        let rest: f64 = comps[1..].iter().map(|c| c.weight).sum();
        comps[0].weight = 1.0 - rest;
        Channel::new(unit(), comps).unwrap()
    })
}

/// Every grammar kind on `[0, 1]`, one channel each, plus two mixtures.
pub fn grammar_channels() -> Vec<Channel> {
    let d = unit();
    let kinds = vec![
        ChannelKind::Identity,
        ChannelKind::Constant(0.0),
        ChannelKind::Quantizer(Quantizer::new(vec![0.0, 0.5, 1.0]).unwrap()),
        ChannelKind::UniformNoise { lo: 0.0, hi: 1.0 },
        ChannelKind::Additive(NoiseDensity::triangular(0.25).unwrap()),
        ChannelKind::Additive(NoiseDensity::gaussian(0.1).unwrap()),
    ];
    let mut out: Vec<Channel> = kinds.iter().map(|k| Channel::pure(d, k.clone()).unwrap()).collect();
    out.push(Channel::mixture(d, 0.5, ChannelKind::Identity, ChannelKind::Constant(0.0)).unwrap());
    out.push(Channel::mixture(d, 0.3, kinds[2].clone(), kinds[4].clone()).unwrap());
    out
}
