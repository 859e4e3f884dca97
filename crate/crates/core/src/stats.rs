//! Deterministic reductions and small regression helpers.

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Least-squares line through `(x_k, y_k)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope: residual scatter and propagated
    /// per-point measurement errors, added in quadrature.
    pub slope_se: f64,
}

/// Ordinary least squares with `y_err` propagated through the slope weights.
pub fn fit_line(xs: &[f64], ys: &[f64], y_err: &[f64]) -> SlopeFit {
    let n = xs.len();
    assert!(n >= 2 && ys.len() == n && y_err.len() == n);
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid_var = if n > 2 {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum::<f64>()
            / (nf - 2.0)
    } else {
        0.0
    };
    let meas_var: f64 = xs
        .iter()
        .zip(y_err)
        .map(|(x, e)| {
            let w = (x - mx) / sxx;
            w * w * e * e
        })
        .sum();
    SlopeFit { slope, intercept, slope_se: (resid_var / sxx + meas_var).sqrt() }
}
