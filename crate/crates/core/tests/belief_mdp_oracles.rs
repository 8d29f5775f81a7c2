use nalgebra::{DMatrix, DVector};
use priorlab::belief_mdp::{
    average_cost_doubling_example, belief_cost, belief_update, bellman, discounted_tv_bounds, doubling_closed_form,
    finite_horizon_cost, initial_belief, observation_kernel, optimal_horizon_cost, sup_policy_deviation,
    value_iteration, Belief, FiniteModel, HistoryPolicy, SimplexGrid,
};
use priorlab::measures::{Interval, MixedMeasure, Rng};
use proptest::prelude::*;

fn stochastic_row(rng: &mut Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.01).collect();
    let s: f64 = raw.iter().sum();
    let mut row: Vec<f64> = raw.iter().map(|v| v / s).collect();
    // put the rounding residue on the last entry so rows sum to 1 exactly enough
    let head: f64 = row[..n - 1].iter().sum();
    row[n - 1] = 1.0 - head;
    row
}

fn random_model(seed: u64, nx: usize, nu: usize, ny: usize, beta: f64) -> FiniteModel {
    let mut rng = Rng::new(seed, 7);
    let t = (0..nu).map(|_| (0..nx).map(|_| stochastic_row(&mut rng, nx)).collect()).collect();
    let qm = (0..nx).map(|_| stochastic_row(&mut rng, ny)).collect();
    let c = (0..nx).map(|_| (0..nu).map(|_| rng.uniform()).collect()).collect();
    FiniteModel::new(t, qm, c, beta).unwrap()
}

fn random_belief(rng: &mut Rng, n: usize) -> Belief {
    Belief::new(stochastic_row(rng, n)).unwrap()
}

fn perfect_observation(seed: u64, nx: usize, nu: usize, beta: f64) -> FiniteModel {
    let mut m = random_model(seed, nx, nu, nx, beta);
    m.qm = (0..nx).map(|i| (0..nx).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    FiniteModel::new(m.t, m.qm, m.c, beta).unwrap()
}

/// Howard policy iteration with an exact linear solve per policy.
fn policy_iteration(m: &FiniteModel) -> Vec<f64> {
    let (nx, nu) = (m.n_states(), m.n_actions());
    let mut pi = vec![0usize; nx];
    loop {
        let a = DMatrix::from_fn(nx, nx, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - m.beta * m.t[pi[i]][i][j]
        });
        let b = DVector::from_fn(nx, |i, _| m.c[i][pi[i]]);
        let v = a.lu().solve(&b).unwrap();
        let q = |x: usize, u: usize| m.c[x][u] + m.beta * (0..nx).map(|y| m.t[u][x][y] * v[y]).sum::<f64>();
        let mut changed = false;
        for x in 0..nx {
            let best = (0..nu).fold(pi[x], |b, u| if q(x, u) < q(x, b) - 1e-14 { u } else { b });
            if best != pi[x] {
                pi[x] = best;
                changed = true;
            }
        }
        if !changed {
            return v.iter().copied().collect();
        }
    }
}

#[test]
fn perfect_observation_matches_policy_iteration() {
    for seed in 0..5 {
        for (nx, beta) in [(2, 0.9), (3, 0.5), (3, 0.9)] {
            let m = perfect_observation(seed, nx, 2, beta);
            let exact = policy_iteration(&m);
            let vt = value_iteration(&m, 4, 1e-9).unwrap();
            for (x, &e) in exact.iter().enumerate() {
                let got = vt.value_at(&Belief::point(nx, x));
                assert!((got - e).abs() < 1e-8, "seed {seed} nx {nx} x {x}: {got} vs {e}");
            }
        }
    }
}

#[test]
fn myopic_limit() {
    let m = random_model(3, 3, 3, 2, 1e-9);
    let vt = value_iteration(&m, 6, 1e-6).unwrap();
    for i in 0..vt.grid.len() {
        let z = vt.grid.belief(i);
        let myopic = (0..3).map(|u| belief_cost(&m, &z, u).unwrap()).fold(f64::INFINITY, f64::min);
        assert!((vt.values[i] - myopic).abs() < 1e-6);
    }
}

#[test]
fn projected_operator_contracts() {
    let resolution = 8;
    for seed in 0..10 {
        let m = random_model(seed, 3, 2, 2, 0.8);
        let grid = SimplexGrid::new(3, resolution).unwrap();
        let mut rng = Rng::new(seed, 99);
        let v1: Vec<f64> = (0..grid.len()).map(|_| 5.0 * rng.uniform()).collect();
        let v2: Vec<f64> = (0..grid.len()).map(|_| 5.0 * rng.uniform()).collect();
        let (t1, _) = bellman(&m, &grid, &v1).unwrap();
        let (t2, _) = bellman(&m, &grid, &v2).unwrap();
        let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let slack = 2.0 * m.cost_sup() / resolution as f64;
        assert!(sup(&t1, &t2) <= m.beta * sup(&v1, &v2) + slack);
    }
}

#[test]
fn residuals_decrease_to_threshold() {
    for seed in 0..5 {
        let m = random_model(seed, 3, 2, 3, 0.9);
        let vt = value_iteration(&m, 6, 1e-6).unwrap();
        let r = &vt.residuals;
        assert!(r[r.len() - 1] <= vt.threshold);
        for w in r[1..].windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{} then {}", w[0], w[1]);
        }
    }
}

fn sample_index(rng: &mut Rng, probs: &[f64]) -> usize {
    let mut u = rng.uniform();
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.len() - 1
}

#[test]
fn horizon_six_matches_monte_carlo() {
    let m = random_model(11, 2, 2, 2, 0.9);
    let prior = Belief::new(vec![0.35, 0.65]).unwrap();
    let h = 6;
    // action = parity of the number of ones observed so far
    let policy = HistoryPolicy::from_fn(&m, h, |hist| hist.iter().sum::<usize>() % 2).unwrap();
    let exact = finite_horizon_cost(&m, &prior, &policy, h).unwrap();
    assert!((exact.leaf_mass - 1.0).abs() < 1e-10);

    let runs = 1_000_000;
    let mut rng = Rng::new(2024, 0);
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..runs {
        let mut x = sample_index(&mut rng, prior.weights());
        let mut code = 0;
        let mut total = 0.0;
        let mut disc = 1.0;
        for t in 0..h {
            let y = sample_index(&mut rng, &m.qm[x]);
            code = code * 2 + y;
            let u = policy.action(t, code);
            total += disc * m.c[x][u];
            disc *= m.beta;
            x = sample_index(&mut rng, &m.t[u][x]);
        }
        sum += total;
        sq += total * total;
    }
    let mean = sum / runs as f64;
    let se = ((sq / runs as f64 - mean * mean) / runs as f64).sqrt();
    assert!((mean - exact.cost).abs() <= 3.0 * se, "{mean} vs {} (se {se})", exact.cost);
}

#[test]
fn zero_cost_model_has_zero_cost() {
    let mut m = random_model(5, 2, 2, 2, 0.5);
    m.c = vec![vec![0.0; 2]; 2];
    let p = Belief::uniform(2);
    let (j, _) = optimal_horizon_cost(&m, &p, 5).unwrap();
    assert_eq!(j, 0.0);
}

#[test]
fn reference_pair_satisfies_both_bounds() {
    let m = random_model(1, 2, 2, 2, 0.9);
    let p = Belief::new(vec![1.0, 0.0]).unwrap();
    let pp = Belief::new(vec![0.6, 0.4]).unwrap();
    let r = discounted_tv_bounds(&m, &p, &pp, 8).unwrap();
    assert!((r.tv - 0.8).abs() < 1e-15);
    assert!(r.continuity_pass && r.mismatch_pass, "{r:?}");

    let same = discounted_tv_bounds(&m, &p, &p, 8).unwrap();
    assert_eq!(same.gap, 0.0);
    assert!(same.mismatch.abs() < 1e-12);

    let far = discounted_tv_bounds(&m, &Belief::point(2, 0), &Belief::point(2, 1), 8).unwrap();
    assert_eq!(far.tv, 2.0);
    assert!(far.continuity_bound >= 2.0 * m.cost_sup() / (1.0 - m.beta));
    assert!(far.continuity_pass && far.mismatch_pass);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn discounted_bounds_on_random_two_state_models(seed in any::<u64>(), high in any::<bool>()) {
        let beta = if high { 0.9 } else { 0.5 };
        let m = random_model(seed, 2, 2, 2, beta);
        let mut rng = Rng::new(seed, 1);
        let p = random_belief(&mut rng, 2);
        let pp = random_belief(&mut rng, 2);
        let r = discounted_tv_bounds(&m, &p, &pp, 8).unwrap();
        prop_assert!(r.continuity_pass, "{:?}", r);
        prop_assert!(r.mismatch_pass, "{:?}", r);

        let dev = sup_policy_deviation(&m, &p, &pp, 8).unwrap();
        prop_assert!(dev <= r.tv * m.cost_sup() / (1.0 - beta) + 1e-9);
        prop_assert!(r.gap <= dev + 1e-12);
    }

    #[test]
    fn filter_and_predictor_normalize(seed in any::<u64>(), nx in 2usize..5, nu in 1usize..4, ny in 2usize..5) {
        let m = random_model(seed, nx, nu, ny, 0.7);
        let mut rng = Rng::new(seed, 2);
        let z = random_belief(&mut rng, nx);
        for u in 0..nu {
            let h = observation_kernel(&m, &z, u).unwrap();
            prop_assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for y in 0..ny {
                let f = belief_update(&m, &z, u, y).unwrap();
                prop_assert!((f.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        for y in 0..ny {
            let z0 = initial_belief(&m, &z, y).unwrap();
            prop_assert!((z0.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn leaf_mass_is_one(seed in any::<u64>(), h in 1usize..9) {
        let m = random_model(seed, 3, 2, 3, 0.6);
        let pol = HistoryPolicy::from_fn(&m, h, |hist| hist[hist.len() - 1] % 2).unwrap();
        let mut rng = Rng::new(seed, 3);
        let r = finite_horizon_cost(&m, &random_belief(&mut rng, 3), &pol, h).unwrap();
        prop_assert!((r.leaf_mass - 1.0).abs() < 1e-10);
    }
}

#[test]
fn deviation_halves_along_mixtures() {
    for seed in 0..10 {
        let m = random_model(seed, 2, 2, 2, 0.9);
        let p = Belief::new(vec![0.9, 0.1]).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..12 {
            let w = 0.5f64.powi(k);
            let pk = Belief::new(vec![(1.0 - w) * 0.9 + w * 0.2, (1.0 - w) * 0.1 + w * 0.8]).unwrap();
            let d = sup_policy_deviation(&m, &p, &pk, 6).unwrap();
            assert!(d <= prev / 2.0 + 1e-9, "seed {seed} k {k}: {d} after {prev}");
            prev = d;
        }
        assert_eq!(sup_policy_deviation(&m, &p, &p, 6).unwrap(), 0.0);
    }
}

#[test]
fn doubling_average_tends_to_one() {
    let r = average_cost_doubling_example(16, 1_000_000).unwrap();
    assert!((r.average - 1.0).abs() < 1e-3);
    assert!((r.average - doubling_closed_form(16, 1_000_000)).abs() < 1e-12);
    let delta0 = MixedMeasure::dirac(Interval::new(-1.0, 1.0).unwrap(), 0.0).unwrap();
    for n in [1, 10, 1000] {
        assert_eq!(priorlab::belief_mdp::doubling_running_average(&delta0, n).unwrap(), 0.0);
    }
}
