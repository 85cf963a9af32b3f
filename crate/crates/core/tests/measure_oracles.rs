mod common;

use common::rng;
use proptest::prelude::*;
use rand::Rng as _;
use triavg::geometry::{haar_rotation, uniform_sphere};
use triavg::measure::{decay_bound, fit_constant, mu_hat_closed, mu_hat_mc, FrequencyPair};
use triavg::verify::calibration_grid;

fn random_pair(r: &mut triavg::rng::Rng, d: usize, radius: f64) -> FrequencyPair {
    let dir = uniform_sphere(r, 2 * d);
    let s = radius * r.random::<f64>();
    FrequencyPair::new(
        dir[..d].iter().map(|x| s * x).collect(),
        dir[d..].iter().map(|x| s * x).collect(),
    )
    .unwrap()
}

#[test]
fn closed_form_matches_monte_carlo_in_four_dimensions() {
    let mut r = rng(1);
    for k in 0..4 {
        let fp = random_pair(&mut r, 4, 10.0);
        let mc = mu_hat_mc(&fp, 1_000_000, 100 + k).unwrap();
        let closed = mu_hat_closed(&fp).unwrap();
        assert!(
            mc.distance_to(closed, 0.0) <= 3.0 * mc.se(),
            "{closed} vs {mc:?}"
        );
    }
}

#[test]
fn monte_carlo_sees_the_exchange_symmetry() {
    let mut r = rng(2);
    for k in 0..4 {
        let fp = random_pair(&mut r, 5, 3.0);
        let a = mu_hat_mc(&fp, 400_000, 200 + k).unwrap();
        let b = mu_hat_mc(&fp.swapped(), 400_000, 300 + k).unwrap();
        assert!(a.distance_to(b.re, b.im) <= 3.0 * a.se().hypot(b.se()));
    }
}

#[test]
fn sphere_zero_is_seen_by_monte_carlo() {
    let fp = FrequencyPair::new(vec![1.0, 0.0, 0.0], vec![0.0; 3]).unwrap();
    let mc = mu_hat_mc(&fp, 1_000_000, 4).unwrap();
    assert!(mc.distance_to(0.0, 0.0) <= 3.0 * mc.se());
    assert!(mu_hat_closed(&fp).unwrap().abs() < 1e-9);
}

#[test]
fn fitted_constant_is_stable_under_refinement() {
    let coarse = fit_constant(&calibration_grid(5, 50.0, 20, 8, 8).unwrap()).unwrap();
    let fine = fit_constant(&calibration_grid(5, 50.0, 40, 16, 16).unwrap()).unwrap();
    assert!(coarse.is_finite() && coarse >= 1.0);
    assert!((fine - coarse).abs() <= 0.1 * coarse, "{coarse} vs {fine}");
    // Random points rarely land near the origin, where the supremum sits, so
    // they only bound the constant from below.
    let mut r = rng(5);
    let random: Vec<_> = (0..500).map(|_| random_pair(&mut r, 5, 50.0)).collect();
    assert!(fit_constant(&random).unwrap() <= fine);
}

#[test]
fn displayed_bound_value() {
    let fp = FrequencyPair::from_invariants(5, 3.0, 3.0, 0.0).unwrap();
    let expect = 4f64.powf(-1.5) * (1.0 + 18f64.sqrt()).powf(-1.5);
    assert!((decay_bound(&fp) - expect).abs() < 1e-15);
    assert!((decay_bound(&fp) - 0.01041).abs() < 1e-5);
}

fn pair(d: usize) -> impl Strategy<Value = FrequencyPair> {
    (
        prop::collection::vec(-8.0f64..8.0, d),
        prop::collection::vec(-8.0f64..8.0, d),
    )
        .prop_map(|(a, b)| FrequencyPair::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exchange_symmetry((fp, _d) in (3usize..8).prop_flat_map(|d| (pair(d), Just(d)))) {
        let a = mu_hat_closed(&fp).unwrap();
        let b = mu_hat_closed(&fp.swapped()).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn rotation_invariance(fp in pair(5), seed in any::<u64>()) {
        let q = haar_rotation(&mut rng(seed), 5).unwrap();
        let rotated = FrequencyPair::new(q.apply(&fp.xi), q.apply(&fp.eta)).unwrap();
        let a = mu_hat_closed(&fp).unwrap();
        let b = mu_hat_closed(&rotated).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn bounded_by_one((fp, _d) in (3usize..8).prop_flat_map(|d| (pair(d), Just(d)))) {
        prop_assert!(mu_hat_closed(&fp).unwrap().abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn decay_estimate_holds_with_a_moderate_constant(fp in pair(5)) {
        prop_assert!(mu_hat_closed(&fp).unwrap().abs() <= 1.5 * decay_bound(&fp));
    }
}
