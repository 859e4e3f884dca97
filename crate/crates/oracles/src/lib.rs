//! Closed-form reference values for tests.
//!
//! Everything here is written independently of `riesz-core`: the harmonic
//! oscillator quantities come from the Mehler kernel, the Brownian quantities
//! from the reflection principle, and integrals use a plain adaptive Simpson
//! rule rather than the library's Gauss–Kronrod pipeline.

use libm::erfc;
use statrs::function::gamma::gamma;

/// Rate λ = √(2κ) of the oscillator `-½ d²/dx² + κ x²`.
fn rate(kappa: f64) -> f64 {
    (2.0 * kappa).sqrt()
}

/// `E_x exp(-κ ∫_0^t X_s² ds)` for standard Brownian motion started at `x`.
pub fn mehler_one(kappa: f64, t: f64, x: f64) -> f64 {
    let l = rate(kappa);
    (l * t).cosh().powf(-0.5) * (-(x * x * l / 2.0) * (l * t).tanh()).exp()
}

/// Time derivative of [`mehler_one`].
pub fn mehler_one_dt(kappa: f64, t: f64, x: f64) -> f64 {
    let l = rate(kappa);
    let c = (l * t).cosh();
    let th = (l * t).tanh();
    let sech2 = 1.0 / (c * c);
    mehler_one(kappa, t, x) * (-0.5 * l * th - (x * x * l * l / 2.0) * sech2)
}

/// Mean and variance of the Gaussian that the killed Mehler kernel
/// `y ↦ K_t(x, y)` is proportional to.
pub fn mehler_endpoint_law(kappa: f64, t: f64, x: f64) -> (f64, f64) {
    let l = rate(kappa);
    let mean = x / (l * t).cosh();
    let var = (l * t).tanh() / l;
    (mean, var)
}

/// `E_x[exp(-κ ∫ X²) · κ^a |X_t|^{2a}]`, i.e. `e^{-tL}(V^a)(x)` for `V = κ x²`.
pub fn mehler_power(kappa: f64, t: f64, x: f64, a: f64) -> f64 {
    let (mean, var) = mehler_endpoint_law(kappa, t, x);
    let sd = var.sqrt();
    let p = 2.0 * a;
    let density = |y: f64| (-(y - mean) * (y - mean) / (2.0 * var)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
    let lo = mean - 12.0 * sd;
    let hi = mean + 12.0 * sd;
    let f = |y: f64| y.abs().powf(p) * density(y);
    // split at the kink of |y|^p
    let moment = if lo < 0.0 && hi > 0.0 {
        simpson(&f, lo, 0.0, 1e-13) + simpson(&f, 0.0, hi, 1e-13)
    } else {
        simpson(&f, lo, hi, 1e-13)
    };
    mehler_one(kappa, t, x) * kappa.powf(a) * moment
}

/// `E|N(0, s)|^p`.
pub fn gaussian_abs_moment(s: f64, p: f64) -> f64 {
    s.powf(p / 2.0) * 2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// Standard normal upper tail `1 - Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Reflection-principle upper bound `4(1 - Φ(r/√t))` on
/// `P(sup_{s≤t} |B_s| ≥ r)`.
pub fn reflection_two_sided_bound(r: f64, t: f64) -> f64 {
    4.0 * normal_sf(r / t.sqrt())
}

/// Exact `P(sup_{s≤t} |B_s| ≥ r)` from the eigenfunction series of the
/// Brownian exit time from `(-r, r)`.
pub fn two_sided_exit_probability(r: f64, t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut stay = 0.0;
    for k in 0..200 {
        let n = (2 * k + 1) as f64;
        let term = (if k % 2 == 0 { 1.0 } else { -1.0 }) / n * (-(n * n) * pi * pi * t / (8.0 * r * r)).exp();
        stay += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    1.0 - 4.0 / pi * stay
}

/// `∫_0^∞ e^{-t L}1(x) t^{a-1} dt · V(x)^a / Γ(a)` for the oscillator
/// `V = κ x²` in one dimension.
pub fn mehler_riesz_1d(kappa: f64, x: f64, a: f64) -> f64 {
    // substitute t = s^{1/a}: t^{a-1} dt = ds / a
    let f = |s: f64| mehler_one(kappa, s.powf(1.0 / a), x) / a;
    let head = simpson(&f, 0.0, 1.0, 1e-12);
    let g = |t: f64| mehler_one(kappa, t, x) * t.powf(a - 1.0);
    let mut body = 0.0;
    let mut lo = 1.0;
    while lo < 120.0 {
        body += simpson(&g, lo, lo + 4.0, 1e-13);
        lo += 4.0;
    }
    (kappa * x * x).powf(a) / gamma(a) * (head + body)
}

/// Closed form of `∫_0^∞ e^{-A t^β} t^γ dt`.
pub fn gamma_integral(big_a: f64, beta: f64, gam: f64) -> f64 {
    let s = (gam + 1.0) / beta;
    gamma(s) / (beta * big_a.powf(s))
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mehler_matches_known_digits() {
        assert!((mehler_one(1.0, 1.0, 0.0) - 0.677_6).abs() < 1e-4);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let h = 1e-5;
        for &(t, x) in &[(0.5, 0.0), (1.0, 1.0), (2.0, 2.0)] {
            let fd = (mehler_one(1.0, t + h, x) - mehler_one(1.0, t - h, x)) / (2.0 * h);
            assert!((fd - mehler_one_dt(1.0, t, x)).abs() < 1e-8);
        }
    }

    #[test]
    fn power_one_is_minus_derivative() {
        // Kernel route and derivative route are two separate formulas.
        for &(t, x) in &[(0.3, 0.0), (1.0, 1.0), (2.0, 0.5)] {
            let lhs = mehler_power(1.0, t, x, 1.0);
            assert!((lhs + mehler_one_dt(1.0, t, x)).abs() < 1e-9, "{lhs}");
        }
    }

    #[test]
    fn exit_series_below_reflection_bound() {
        for &(r, t) in &[(2.0, 0.5), (1.0, 1.0), (0.5, 0.2)] {
            let p = two_sided_exit_probability(r, t);
            // at (2, 0.5) the two agree to ~1e-17; the series loses ~1e-16 to cancellation
            assert!(p <= reflection_two_sided_bound(r, t) * (1.0 + 1e-12), "{p} at ({r}, {t})");
            assert!(p >= 2.0 * normal_sf(r / t.sqrt()) - 1e-15);
        }
    }

    #[test]
    fn gamma_integral_against_simpson() {
        let f = |t: f64| (-3.0 * t.powf(1.5)).exp() * t.powf(0.2);
        let num = simpson(&f, 0.0, 10.0, 1e-12);
        assert!((num - gamma_integral(3.0, 1.5, 0.2)).abs() < 1e-8);
    }
}
