//! Adaptive Gauss–Kronrod quadrature and the `t^{a-1}`-weighted pipeline
//! used for the Riesz integrals.

use crate::error::{invalid, Error, Result};

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Integral {
    pub fn zero() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Panel { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() }
}

/// Globally adaptive G7/K15 quadrature of `f` on `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid(format!("integration limits must be finite: [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral::zero());
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(Integral { value: -r.value, ..r });
    }
    let mut panels = vec![gk15(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureNonConvergence { estimate: value, error });
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Integral { value, error, evaluations });
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::QuadratureNonConvergence { estimate: value, error });
        }
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (k, p)| if p.error > acc.1 { (k, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // panel exhausted floating point resolution
            return Err(Error::QuadratureNonConvergence { estimate: value, error });
        }
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
        evaluations += 30;
    }
}

/// Lower and upper pieces of `∫_0^cutoff f(t) t^{a-1} dt`, split at `split`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitIntegral {
    pub lower: Integral,
    pub upper: Integral,
}

impl SplitIntegral {
    pub fn value(&self) -> f64 {
        self.lower.value + self.upper.value
    }

    pub fn error(&self) -> f64 {
        self.lower.error + self.upper.error
    }
}

/// Integrates `f(t) t^{a-1}` over `(0, cutoff]`.
///
/// On `(0, split]` with `a < 1` the substitution `t = u^{1/a}` turns the
/// measure `t^{a-1} dt` into `du / a`, leaving the smooth integrand
/// `f(u^{1/a}) / a` on `[0, split^a]`. For `a >= 1` the weight is bounded
/// and integrated directly.
pub fn integrate_power_weight<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    split: f64,
    cutoff: f64,
    opts: &QuadOptions,
) -> Result<SplitIntegral> {
    if !(a > 0.0) {
        return Err(invalid(format!("weight exponent must be positive, got {a}")));
    }
    if !(split > 0.0) {
        return Err(invalid(format!("split point must be positive, got {split}")));
    }
    let head_end = split.min(cutoff);
    let lower = if a < 1.0 {
        let inv = 1.0 / a;
        integrate(|u| f(u.powf(inv)) * inv, 0.0, head_end.powf(a), opts)?
    } else if a == 1.0 {
        integrate(&f, 0.0, head_end, opts)?
    } else {
        integrate(|t| f(t) * t.powf(a - 1.0), 0.0, head_end, opts)?
    };
    let upper =
        if cutoff > split { integrate(|t| f(t) * t.powf(a - 1.0), split, cutoff, opts)? } else { Integral::zero() };
    Ok(SplitIntegral { lower, upper })
}

/// Golden-section search for the maximum of a unimodal function on
/// `[lo, hi]`. Returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, x_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
