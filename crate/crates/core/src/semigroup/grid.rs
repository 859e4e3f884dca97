//! Crank–Nicolson solver for `∂_t u = ½ ∂²_x u - V u` on `[-X, X]` with
//! absorbing (zero) boundary values.
//!
//! The first two steps are replaced by four backward-Euler half steps
//! (Rannacher start-up), which damps the grid-scale modes excited by the
//! jump between the initial datum and the zero boundary.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSolverConfig {
    /// Half-width of the computational domain.
    pub x_max: f64,
    pub n_cells: usize,
    pub dt_solver: f64,
}

impl GridSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(invalid(format!("x_max must be positive, got {}", self.x_max)));
        }
        if self.n_cells < 64 {
            return Err(invalid(format!("need at least 64 cells, got {}", self.n_cells)));
        }
        if !(self.dt_solver > 0.0 && self.dt_solver.is_finite()) {
            return Err(invalid(format!("solver step must be positive, got {}", self.dt_solver)));
        }
        Ok(())
    }

    /// Largest `|x|` at which queries are accepted.
    pub fn safe_limit(&self) -> f64 {
        0.5 * self.x_max
    }

    pub fn check_query(&self, x: f64) -> Result<()> {
        if x.abs() > self.safe_limit() {
            Err(Error::OutsideSafeRegion { x, limit: self.safe_limit() })
        } else {
            Ok(())
        }
    }

    /// The same domain at twice the resolution in space and time.
    pub fn refined(&self) -> Self {
        Self { x_max: self.x_max, n_cells: 2 * self.n_cells, dt_solver: 0.5 * self.dt_solver }
    }
}

/// Thomas factorization of the constant tridiagonal matrix `I - (τ/2) A`.
struct Factorization {
    tau: f64,
    off: f64,
    inv_denom: Vec<f64>,
    c_prime: Vec<f64>,
    // explicit half `I + (τ/2) A`
    rhs_diag: Vec<f64>,
    rhs_off: f64,
}

impl Factorization {
    fn new(tau: f64, h: f64, pot: &[f64]) -> Self {
        let n = pot.len();
        let r = 1.0 / (h * h);
        let off = -0.25 * tau * r;
        let mut inv_denom = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut prev_c = 0.0;
        for j in 0..n {
            let diag = 1.0 + 0.5 * tau * (r + pot[j]);
            let denom = diag - off * prev_c;
            inv_denom[j] = 1.0 / denom;
            c_prime[j] = off / denom;
            prev_c = c_prime[j];
        }
        let rhs_diag = pot.iter().map(|v| 1.0 - 0.5 * tau * (r + v)).collect();
        Self { tau, off, inv_denom, c_prime, rhs_diag, rhs_off: 0.25 * tau * r }
    }

    /// Solves `(I - (τ/2)A) y = rhs` in place.
    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let mut prev = 0.0;
        for j in 0..n {
            let v = (rhs[j] - self.off * prev) * self.inv_denom[j];
            rhs[j] = v;
            prev = v;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            rhs[j] -= self.c_prime[j] * rhs[j + 1];
        }
    }

    fn apply_explicit(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        for j in 0..n {
            let left = if j > 0 { u[j - 1] } else { 0.0 };
            let right = if j + 1 < n { u[j + 1] } else { 0.0 };
            out[j] = self.rhs_diag[j] * u[j] + self.rhs_off * (left + right);
        }
    }
}

pub(crate) struct CrankNicolson {
    x_max: f64,
    h: f64,
    /// interior node positions
    nodes: Vec<f64>,
    pot: Vec<f64>,
}

impl CrankNicolson {
    pub(crate) fn new(x_max: f64, n_cells: usize, potential: impl Fn(f64) -> f64) -> Self {
        let h = 2.0 * x_max / n_cells as f64;
        let nodes: Vec<f64> = (1..n_cells).map(|j| -x_max + j as f64 * h).collect();
        let pot = nodes.iter().map(|&x| potential(x)).collect();
        Self { x_max, h, nodes, pot }
    }

    pub(crate) fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Cubic Lagrange interpolation of the interior vector `u` (zero at the
    /// boundary) at `x`.
    fn interpolate(&self, u: &[f64], x: f64) -> f64 {
        let n_nodes = u.len() + 2;
        let val = |k: usize| if k == 0 || k == n_nodes - 1 { 0.0 } else { u[k - 1] };
        let s = (x + self.x_max) / self.h;
        let j = (s.floor() as isize).clamp(1, n_nodes as isize - 3) as usize;
        let base = j - 1;
        let frac = s - base as f64;
        // nodes at offsets 0, 1, 2, 3 from `base`
        let mut acc = 0.0;
        for k in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != k {
                    w *= (frac - m as f64) / (k as f64 - m as f64);
                }
            }
            acc += w * val(base + k);
        }
        acc
    }

    /// Marches `datum` to every output time, taking `steps[k]` equal steps
    /// on the `k`-th interval, and interpolates at `xs`. Returns `[time][x]`.
    pub(crate) fn march(&self, datum: &[f64], output_times: &[f64], steps: &[usize], xs: &[f64]) -> Vec<Vec<f64>> {
        debug_assert_eq!(output_times.len(), steps.len());
        let mut u = datum.to_vec();
        let mut scratch = vec![0.0; u.len()];
        let mut fact: Option<Factorization> = None;
        let mut startup = 2usize;
        let mut t = 0.0;
        let mut out = Vec::with_capacity(output_times.len());
        for (&t_out, &n) in output_times.iter().zip(steps) {
            let n = n.max(1);
            let tau = (t_out - t) / n as f64;
            if tau > 0.0 {
                let stale = fact.as_ref().is_none_or(|f| (f.tau - tau).abs() > 1e-9 * tau);
                if stale {
                    fact = Some(Factorization::new(tau, self.h, &self.pot));
                }
                let f = fact.as_ref().expect("factorization");
                for _ in 0..n {
                    if startup > 0 {
                        // two backward-Euler steps of size τ/2 share the CN matrix
                        f.solve(&mut u);
                        f.solve(&mut u);
                        startup -= 1;
                    } else {
                        f.apply_explicit(&u, &mut scratch);
                        f.solve(&mut scratch);
                        std::mem::swap(&mut u, &mut scratch);
                    }
                }
            }
            t = t_out;
            out.push(xs.iter().map(|&x| self.interpolate(&u, x)).collect());
        }
        out
    }
}
