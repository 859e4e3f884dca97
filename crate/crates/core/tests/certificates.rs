//! Certificates on small grids, checked against closed forms where the
//! oscillator provides one.

use riesz_core::semigroup::semigroup_power_1d;
use riesz_core::verify::{
    certify_derivative_identity, certify_reflection_bound, certify_small_time_decay,
    certify_small_time_decay_near_origin, certify_xexmax, extend_decay_constant, fit_large_time_decay, DecayGrid,
    DerivativeGrid, ReflectionGrid,
};
use riesz_core::{Backend, GridOptions, PathConfig, Potential};
use riesz_oracles as oracle;

fn grid() -> Backend {
    Backend::Grid(GridOptions::default())
}

fn short(split_n: f64) -> DecayGrid {
    DecayGrid { split_n, times: (1..=4).map(|k| k as f64 * split_n / 4.0).collect(), xs: vec![0.5, 1.0, 2.0, 4.0] }
}

#[test]
fn decay_constant_shrinks_with_split_point() {
    let p = Potential::seeded_uniform(2.0, 2, 0.5, 2.0, 7).unwrap();
    let mut last = f64::INFINITY;
    for n in [0.25, 0.5, 1.0, 2.0] {
        let c = certify_small_time_decay(&p, &short(n), &grid()).unwrap();
        assert!(c.passed);
        let c_n = c.fitted_constants["c_N"];
        assert!(c_n <= last * (1.0 + 1e-9), "N={n}: {c_n} after {last}");
        last = c_n;
    }
}

#[test]
fn extended_constant_still_bounds() {
    // a constant fitted on [0, 1/2] and extended to [1/2, 2] must hold there
    let p = Potential::constant(1.0, 1, 1.0).unwrap();
    let c = certify_small_time_decay(&p, &short(0.5), &grid()).unwrap().fitted_constants["c_N"];
    let ext = extend_decay_constant(c, 0.5, 2.0);
    let wide = DecayGrid { split_n: 2.0, times: vec![0.5, 1.0, 1.5, 2.0], xs: vec![0.5, 1.0, 2.0, 4.0] };
    let fitted = certify_small_time_decay(&p, &wide, &grid()).unwrap().fitted_constants["c_N"];
    assert!(ext <= fitted, "extended {ext} vs fitted {fitted}");
}

#[test]
fn near_origin_constant_not_above_plain_one() {
    // the near-origin exponent is larger, so its fitted constant cannot exceed the plain fit on the same nodes
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    let g = short(1.0);
    let plain = certify_small_time_decay(&p, &g, &grid()).unwrap().fitted_constants["c_N"];
    let near = certify_small_time_decay_near_origin(&p, &g, &grid()).unwrap().fitted_constants["c_N"];
    assert!(near <= plain, "{near} vs {plain}");
    assert!(near > 0.0);
    assert!(certify_small_time_decay_near_origin(&p, &DecayGrid { xs: vec![5.0], ..g }, &grid()).is_err());
}

#[test]
fn oscillator_large_time_rate_below_ground_state() {
    // e^{-tL}1(0) = (cosh √2 t)^{-1/2} decays at rate √2/2 per coordinate
    let p = Potential::constant(2.0, 4, 1.0).unwrap();
    let c = fit_large_time_decay(&p, 4, &DecayGrid::large_time(1.0), &grid()).unwrap();
    assert!(c.passed);
    let delta = c.fitted_constants["delta_fit"];
    assert!(delta > 0.0 && delta <= std::f64::consts::FRAC_1_SQRT_2 + 1e-9, "{delta}");
    assert!((c.fitted_constants["d_delta"] - 4.0 * delta).abs() < 1e-12);
    for node in c.nodes.iter().filter(|n| n.d == Some(4)) {
        assert!(node.margin >= 0.0);
    }
}

#[test]
fn derivative_matches_closed_form_time_derivative() {
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    for (x, t) in [(0.0, 0.5), (1.0, 1.0), (2.0, 0.25)] {
        let w = semigroup_power_1d(&p, 0, x, t, 1.0, &grid()).unwrap().value;
        let exact = oracle::mehler_one_dt(1.0, t, x);
        assert!((-w - exact).abs() < 2e-4 * exact.abs() + 1e-6, "x={x} t={t}: {} vs {exact}", -w);
    }
    let c = certify_derivative_identity(&p, &DerivativeGrid::default(), &grid()).unwrap();
    assert!(c.passed, "{}", c.worst_margin);
    assert!(c.flags.is_empty(), "{:?}", c.flags);
}

#[test]
fn reflection_single_node() {
    let cfg = PathConfig { n_paths: 50_000, dt: 1e-3, horizon: 0.5, seed: 3, antithetic: false };
    let c = certify_reflection_bound(&cfg, &ReflectionGrid { xs: vec![4.0], times: vec![0.5] }).unwrap();
    assert_eq!(c.nodes.len(), 1);
    let node = &c.nodes[0];
    assert!((node.bound - 4.0 * (-4.0f64).exp()).abs() < 1e-15);
    assert!(node.estimate <= oracle::two_sided_exit_probability(2.0, 0.5) + node.error);
    assert!(c.passed);
}

#[test]
fn xexmax_maximizer_and_validation() {
    let c = certify_xexmax(&[(1.0, 1.0, 1.0)]).unwrap();
    assert!(c.passed);
    assert!((c.nodes[0].x[0] - 2.0).abs() < 1e-6);
    assert!(certify_xexmax(&[(0.0, 1.0, 1.0)]).is_err());
    assert!(certify_xexmax(&[]).is_err());
}
