//! Scalar special functions.

use libm::erfc;

/// Γ(x) for x > 0 (Lanczos approximation).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Regularized upper incomplete gamma function `Q(a, x) = Γ(a, x)/Γ(a)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        statrs::function::gamma::gamma_ur(a, x)
    }
}

/// Upper bound `e^{-z} ln(1 + 1/z)` for the exponential integral `E_1(z)`, `z > 0`.
pub fn exp_integral_e1_upper(z: f64) -> f64 {
    (-z).exp() * (1.0 / z).ln_1p()
}

/// Upper tail of the standard normal distribution, `1 - Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `E|X|^p` for `X ~ N(0, s)`.
pub fn gaussian_abs_moment(s: f64, p: f64) -> f64 {
    s.powf(p / 2.0) * 2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}
