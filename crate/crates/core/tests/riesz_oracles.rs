//! Riesz functionals against Mehler-kernel quadrature, the Gamma integral
//! closed form, and the telescope `∫_0^∞ e^{-tL}V dt = 1`.

use riesz_core::riesz::{
    adjoint_functional, direct_time_integrals, gamma_integral_oracle, gamma_integral_quadrature,
    regularized_adjoint_mc, riesz_one,
};
use riesz_core::semigroup::Observable;
use riesz_core::{Backend, GridOptions, PathConfig, Potential, RieszEvaluator, RieszParams};
use riesz_oracles as oracle;

fn grid() -> Backend {
    Backend::Grid(GridOptions::default())
}

fn params(a: f64) -> RieszParams {
    RieszParams { a, ..RieszParams::default() }
}

#[test]
fn one_dimensional_oscillator_matches_mehler_quadrature() {
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    let xs = [0.5, 1.0, 1.5, 2.0];
    let points: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    for a in [0.5, 1.0, 2.0] {
        let ev = RieszEvaluator::new(&p, &grid(), &params(a), &points, false).unwrap();
        for &x in &xs {
            let v = ev.riesz_one(&[x]).unwrap();
            let exact = oracle::mehler_riesz_1d(1.0, x, a);
            // the reference quadrature is itself good to ~1e-9
            assert!(
                (v.value - exact).abs() <= v.combined_error(3.0) + 1e-8 * exact,
                "a={a} x={x}: {} ± {:e} vs {exact}",
                v.value,
                v.combined_error(3.0)
            );
        }
    }
}

#[test]
fn frozen_unit_exponent_values() {
    // Mehler-kernel quadrature computed independently before the build
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    for (x, expected) in [(0.5, 0.40560), (1.0, 1.10613), (1.5, 1.40448), (2.0, 1.31023)] {
        let v = riesz_one(&p, &[x], &params(1.0), &grid()).unwrap();
        assert!((v.value - expected).abs() < 1e-5, "x={x}: {}", v.value);
    }
}

#[test]
fn zero_at_origin() {
    let p = Potential::constant(1.0, 3, 1.0).unwrap();
    let v = riesz_one(&p, &[0.0; 3], &params(0.5), &grid()).unwrap();
    assert_eq!(v.value, 0.0);
}

#[test]
fn split_point_does_not_matter() {
    let p = Potential::seeded_uniform(1.0, 2, 0.5, 2.0, 7).unwrap();
    let x = [1.0, -0.5];
    let vals: Vec<_> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&n| riesz_one(&p, &x, &RieszParams { a: 0.5, split_n: n, ..RieszParams::default() }, &grid()).unwrap())
        .collect();
    for v in &vals[1..] {
        let tol = v.combined_error(3.0) + vals[0].combined_error(3.0);
        assert!((v.value - vals[0].value).abs() <= tol, "{} vs {}", v.value, vals[0].value);
    }
}

#[test]
fn gamma_matrix() {
    for a in [0.5, 1.0, 5.0] {
        for beta in [1.0, 1.5, 2.0] {
            for gamma in [-0.5, 0.0, 1.0] {
                let q = gamma_integral_quadrature(a, beta, gamma, 1e-10).unwrap();
                let exact = oracle::gamma_integral(a, beta, gamma);
                assert!((q - exact).abs() <= 1e-6 * exact, "({a}, {beta}, {gamma}): {q} vs {exact}");
                assert!((gamma_integral_oracle(a, beta, gamma).unwrap() - exact).abs() <= 1e-12 * exact);
            }
        }
    }
}

#[test]
fn gamma_examples() {
    assert!((gamma_integral_oracle(1.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((gamma_integral_oracle(2.0, 2.0, 1.0).unwrap() - 0.25).abs() < 1e-14);
    let q = gamma_integral_quadrature(3.0, 1.5, 0.2, 1e-10).unwrap();
    let by_simpson = oracle::simpson(&|t: f64| (-3.0 * t.powf(1.5)).exp() * t.powf(0.2), 1e-12, 40.0, 1e-12);
    assert!((q - by_simpson).abs() < 1e-7 * q);
    assert!(gamma_integral_oracle(1.0, 1.0, -1.0).is_err());
}

#[test]
fn adjoint_telescopes_to_one() {
    for alpha in [1.0, 2.0] {
        let p = Potential::seeded_uniform(alpha, 2, 0.5, 2.0, 7).unwrap();
        for x in [vec![0.0], vec![1.0], vec![0.5, -2.0]] {
            let v = adjoint_functional(&p.prefix(x.len()).unwrap(), &x, &params(1.0), &grid()).unwrap().holder;
            assert!(
                (v.value - 1.0).abs() <= v.combined_error(3.0),
                "alpha={alpha} x={x:?}: {} ± {:e}",
                v.value,
                v.combined_error(3.0)
            );
        }
    }
}

#[test]
fn both_adjoint_forms_bound_the_direct_value() {
    // (e^{-tL}V)^a ≥ e^{-tL}(V^a) and Σ_i e^{-tL}(V_i^a) ≥ e^{-tL}(V^a) for a < 1
    let p = Potential::seeded_uniform(2.0, 3, 0.5, 2.0, 7).unwrap();
    let x = [0.3, 1.0, -0.7];
    let v = adjoint_functional(&p, &x, &params(0.5), &grid()).unwrap();
    let cfg = PathConfig { n_paths: 20_000, dt: 2e-3, horizon: 8.0, seed: 13, antithetic: false };
    let direct =
        &direct_time_integrals(&p, &x, &params(0.5), &cfg, &[(Observable::PotentialPower(0.5), None)]).unwrap()[0];
    for form in [&v.holder, &v.subadditive] {
        assert!(
            direct.value <= form.value + form.combined_error(3.0) + direct.combined_error(3.0),
            "direct {} vs form {}",
            direct.value,
            form.value
        );
    }
    assert!(v.subadditive.value > 0.0 && v.holder.value > 0.0);
}

#[test]
fn regularized_adjoint_converges() {
    let p = Potential::constant(2.0, 2, 1.0).unwrap();
    let cfg = PathConfig { n_paths: 20_000, dt: 2e-3, horizon: 12.0, seed: 71, antithetic: false };
    let caps = [0.5, 2.0, 8.0, 64.0];
    let (unreg, regs) = regularized_adjoint_mc(&p, &[0.5, 0.5], &params(0.5), &cfg, &caps).unwrap();
    let gaps: Vec<f64> = regs.iter().map(|r| (unreg.value - r.value).abs()).collect();
    for w in gaps.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{gaps:?}");
    }
    // once the cap is inactive the damping bias ∫ g(t)(1 - e^{-t/cap}) decays like 1/cap
    assert!(gaps[3] * caps[3] <= 1.5 * gaps[2] * caps[2], "{gaps:?}");
    assert!(gaps[3] < 0.01 * unreg.value, "{gaps:?}");
}

#[test]
fn monte_carlo_backend_agrees_with_oracle() {
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    let cfg = PathConfig { n_paths: 8_000, dt: 5e-3, horizon: 24.0, seed: 91, antithetic: false };
    let v = riesz_one(&p, &[1.0], &params(0.5), &Backend::MonteCarlo(cfg)).unwrap();
    let exact = oracle::mehler_riesz_1d(1.0, 1.0, 0.5);
    assert!((v.value - exact).abs() <= v.combined_error(3.0), "{} ± {:e} vs {exact}", v.value, v.combined_error(3.0));
}
