use proptest::prelude::*;

use riesz_core::riesz::{gamma_integral_oracle, gamma_integral_quadrature};
use riesz_core::semigroup::{semigroup_one_1d, time_mesh};
use riesz_core::verify::xexmax_bound;
use riesz_core::{Backend, GridOptions, Potential};
use riesz_oracles as oracle;

fn coarse() -> Backend {
    Backend::Grid(GridOptions { n_cells: 512, dt_max: 5e-3, min_x_max: 8.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_semigroup_even_and_radially_decreasing(
        alpha in 0.5f64..=2.0,
        kappa in 0.5f64..2.0,
        t in 0.05f64..2.0,
        x in 0.0f64..3.0,
        dx in 0.05f64..1.0,
    ) {
        let p = Potential::constant(alpha, 1, kappa).unwrap();
        let u = semigroup_one_1d(&p, 0, x, t, &coarse()).unwrap();
        let neg = semigroup_one_1d(&p, 0, -x, t, &coarse()).unwrap();
        let far = semigroup_one_1d(&p, 0, x + dx, t, &coarse()).unwrap();
        prop_assert!((u.value - neg.value).abs() <= 1e-12);
        prop_assert!(far.value <= u.value + u.discretization_error + far.discretization_error);
        prop_assert!(u.value > 0.0 && u.value <= 1.0 + u.discretization_error);
    }

    #[test]
    fn grid_semigroup_decreasing_in_time(alpha in 0.5f64..=2.0, x in -3.0f64..3.0, t in 0.05f64..1.5, dt in 0.05f64..1.0) {
        let p = Potential::constant(alpha, 1, 1.0).unwrap();
        let a = semigroup_one_1d(&p, 0, x, t, &coarse()).unwrap();
        let b = semigroup_one_1d(&p, 0, x, t + dt, &coarse()).unwrap();
        prop_assert!(b.value <= a.value + a.discretization_error + b.discretization_error);
    }

    #[test]
    fn oscillator_grid_tracks_mehler(t in 0.1f64..2.0, x in -3.0f64..3.0) {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let u = semigroup_one_1d(&p, 0, x, t, &coarse()).unwrap();
        let exact = oracle::mehler_one(1.0, t, x);
        prop_assert!((u.value - exact).abs() <= 3.0 * u.discretization_error + 1e-9, "{} vs {exact}", u.value);
    }
}

proptest! {
    #[test]
    fn gamma_quadrature_matches_closed_form(a in 0.1f64..10.0, beta in 0.5f64..3.0, gamma in -0.9f64..3.0) {
        let q = gamma_integral_quadrature(a, beta, gamma, 1e-10).unwrap();
        let exact = oracle::gamma_integral(a, beta, gamma);
        prop_assert!((q - exact).abs() <= 1e-6 * exact, "{q} vs {exact}");
        prop_assert!((gamma_integral_oracle(a, beta, gamma).unwrap() - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn xexmax_bound_dominates(a in 0.05f64..4.0, c in 0.05f64..4.0, n in 0.1f64..8.0, v in 0.0f64..100.0) {
        let f = v.powf(a) * (-0.5 * n * c * v).exp();
        prop_assert!(f <= xexmax_bound(a, c, n) * (1.0 + 1e-12));
        let v_star = 2.0 * a / (n * c);
        let at = v_star.powf(a) * (-0.5 * n * c * v_star).exp();
        prop_assert!((at - xexmax_bound(a, c, n)).abs() <= 1e-12 * at);
    }

    #[test]
    fn time_mesh_spacing(t_end in 0.01f64..40.0, base in 1e-3f64..0.2) {
        let m = time_mesh(t_end, base);
        prop_assert_eq!(m[0], 0.0);
        prop_assert_eq!(*m.last().unwrap(), t_end);
        for w in m.windows(2) {
            let h = w[1] - w[0];
            prop_assert!(h > 0.0);
            // steps double at t = 1, 2, 4, 8 and stay fixed beyond
            let level = if w[0] < 1.0 - 1e-12 { 0 } else { (w[0] + 1e-12).log2().floor().min(3.0) as i32 + 1 };
            prop_assert!(h <= base * 2f64.powi(level) * (1.0 + 1e-9), "h={h} at {}", w[0]);
        }
    }
}
