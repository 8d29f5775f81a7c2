mod common;

use common::{measure, unit};
use priorlab::measures::{bounded_lipschitz_distance, total_variation, wasserstein1, MixedMeasure};
use proptest::prelude::*;

/// `Σ |Δ atoms| + ∫ |Δ density|` by a fine midpoint rule, no root finding.
fn tv_by_grid(p: &MixedMeasure, q: &MixedMeasure) -> f64 {
    let mut locs: Vec<f64> = p.atoms().iter().chain(q.atoms()).map(|a| a.loc).collect();
    locs.sort_by(f64::total_cmp);
    locs.dedup();
    let atoms: f64 = locs.iter().map(|&x| (p.atom_weight_at(x) - q.atom_weight_at(x)).abs()).sum();
    let n = 200_000;
    let h = 1.0 / n as f64;
    let dens: f64 = (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            (p.density_at(x) - q.density_at(x)).abs() * h
        })
        .sum();
    atoms + dens
}

fn w1_by_grid(p: &MixedMeasure, q: &MixedMeasure) -> f64 {
    let n = 200_000;
    let h = 1.0 / n as f64;
    (0..n).map(|i| (p.cdf((i as f64 + 0.5) * h) - q.cdf((i as f64 + 0.5) * h)).abs() * h).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tv_axioms(p in measure(), q in measure(), r in measure()) {
        let pq = total_variation(&p, &q).unwrap();
        prop_assert!(total_variation(&p, &p).unwrap() < 1e-12);
        prop_assert!((pq - total_variation(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!(pq <= 2.0 + 1e-12);
        let pr = total_variation(&p, &r).unwrap();
        let rq = total_variation(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + 1e-12);
    }

    #[test]
    fn w1_axioms(p in measure(), q in measure(), r in measure()) {
        let pq = wasserstein1(&p, &q).unwrap();
        prop_assert!(wasserstein1(&p, &p).unwrap() < 1e-12);
        prop_assert!((pq - wasserstein1(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!(pq <= wasserstein1(&p, &r).unwrap() + wasserstein1(&r, &q).unwrap() + 1e-12);
        // |F_p - F_q| ≤ TV/2 on a unit-length domain
        prop_assert!(pq <= 0.5 * total_variation(&p, &q).unwrap() + 1e-12);
    }

    #[test]
    fn bl_is_dominated_by_tv_and_w1(p in measure(), q in measure()) {
        let bl = bounded_lipschitz_distance(&p, &q, 64).unwrap();
        prop_assert!(bl >= 0.0);
        prop_assert!(bl <= total_variation(&p, &q).unwrap() + 1e-12);
        prop_assert!(bl <= wasserstein1(&p, &q).unwrap() + 1e-12);
        prop_assert!(bounded_lipschitz_distance(&p, &p, 64).unwrap() < 1e-12);
        // nested function families
        prop_assert!(bounded_lipschitz_distance(&p, &q, 128).unwrap() >= bl - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_metrics_match_grid_oracles(p in measure(), q in measure()) {
        prop_assert!((total_variation(&p, &q).unwrap() - tv_by_grid(&p, &q)).abs() < 1e-4);
        prop_assert!((wasserstein1(&p, &q).unwrap() - w1_by_grid(&p, &q)).abs() < 2e-5);
    }
}

#[test]
fn weak_but_not_tv_convergence_of_erasure_pair() {
    let p = MixedMeasure::discrete(unit(), &[(0.0, 0.5), (1.0, 0.5)]).unwrap();
    for n in [10.0, 100.0, 1000.0] {
        let pn = MixedMeasure::discrete(unit(), &[(1.0 / n, 0.5), (1.0, 0.5)]).unwrap();
        assert!((total_variation(&pn, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((wasserstein1(&pn, &p).unwrap() - 0.5 / n).abs() < 1e-15);
    }
}
