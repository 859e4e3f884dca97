//! One-dimensional semigroup values tabulated on a time mesh.

use super::BackendKind;
use crate::stats::mean_and_stderr;

/// Time mesh on `[0, t_end]`: spacing `base` on `[0, 1]`, doubling on each
/// dyadic interval up to `16·base` from `t = 8` on. Includes `t = 0` and
/// ends exactly at `t_end`.
pub fn time_mesh(t_end: f64, base: f64) -> Vec<f64> {
    assert!(t_end > 0.0 && base > 0.0);
    let mut nodes = vec![0.0];
    let mut level_start = 0.0;
    let mut level = 0u32;
    loop {
        let level_end = if level == 0 {
            1.0
        } else if level < 4 {
            2f64.powi(level as i32)
        } else {
            f64::INFINITY
        };
        let step = base * 2f64.powi(level as i32);
        let mut j = 1u64;
        loop {
            let t = level_start + j as f64 * step;
            if t >= t_end - 1e-12 * step {
                nodes.push(t_end);
                return nodes;
            }
            if t > level_end - 1e-12 * step {
                break;
            }
            nodes.push(t);
            j += 1;
        }
        level_start = level_end;
        if *nodes.last().unwrap() < level_end - 1e-12 {
            nodes.push(level_end);
        }
        level += 1;
    }
}

/// `t ↦ e^{-tL_i} f(x)` at a set of points `xs`, tabulated on a mesh.
///
/// Replica 0 is the estimate. Further replicas are the coarse-grid solution
/// (grid backend) or independent batch estimates (Monte Carlo backend).
#[derive(Debug, Clone)]
pub struct Trajectory {
    kind: BackendKind,
    times: Vec<f64>,
    xs: Vec<f64>,
    /// `replicas[r][x][k]`
    replicas: Vec<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub(crate) fn new(kind: BackendKind, times: Vec<f64>, xs: Vec<f64>, replicas: Vec<Vec<Vec<f64>>>) -> Self {
        debug_assert!(replicas.iter().all(|r| r.len() == xs.len() && r.iter().all(|s| s.len() == times.len())));
        Self { kind, times, xs, replicas }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn n_replicas(&self) -> usize {
        self.replicas.len()
    }

    /// Index of `x` among the tabulated points (exact match, up to sign for
    /// the even semigroups tabulated at `|x|`).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.xs.iter().position(|&y| y == x)
    }

    pub fn node_values(&self, replica: usize, xi: usize) -> &[f64] {
        &self.replicas[replica][xi]
    }

    /// `(standard error, discretization error)` of the interpolated value:
    /// the spread of the batch replicas for Monte Carlo, the fine/coarse
    /// difference for the grid.
    pub fn errors(&self, xi: usize, t: f64) -> (f64, f64) {
        match self.kind {
            BackendKind::Grid => {
                let d = if self.replicas.len() > 1 { (self.value(0, xi, t) - self.value(1, xi, t)).abs() } else { 0.0 };
                (0.0, d)
            }
            BackendKind::MonteCarlo => {
                let batches: Vec<f64> = (1..self.replicas.len()).map(|r| self.value(r, xi, t)).collect();
                (mean_and_stderr(&batches).1, 0.0)
            }
        }
    }

    /// Cubic Lagrange interpolation in time over the four nearest nodes.
    pub fn value(&self, replica: usize, xi: usize, t: f64) -> f64 {
        self.interpolate(replica, xi, t, false)
    }

    /// Cubic interpolation on the neighbouring four-node stencil. Its
    /// distance from [`Trajectory::value`] estimates the interpolation error.
    pub fn value_shifted(&self, replica: usize, xi: usize, t: f64) -> f64 {
        self.interpolate(replica, xi, t, true)
    }

    fn interpolate(&self, replica: usize, xi: usize, t: f64, shifted: bool) -> f64 {
        let series = &self.replicas[replica][xi];
        let n = self.times.len();
        if n == 1 {
            return series[0];
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
        if t == self.times[k] {
            return series[k];
        }
        if n < 4 {
            let (t0, t1) = (self.times[k], self.times[k + 1]);
            let w = (t - t0) / (t1 - t0);
            return series[k] * (1.0 - w) + series[k + 1] * w;
        }
        let base = k.saturating_sub(1).min(n - 4);
        let (lo, len) = if !shifted {
            (base, 4)
        } else if base < k && base + 4 < n {
            (base + 1, 4)
        } else if base > 0 && base + 1 >= k {
            (base - 1, 4)
        } else if k == 0 {
            // first and last intervals have a single cubic stencil; fall back
            // to the quadratic, whose error dominates the cubic's
            (0, 3)
        } else {
            (n - 3, 3)
        };
        lagrange(&self.times[lo..lo + len], &series[lo..lo + len], t)
    }
}

fn lagrange(ts: &[f64], vs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for a in 0..ts.len() {
        let mut w = 1.0;
        for b in 0..ts.len() {
            if a != b {
                w *= (t - ts[b]) / (ts[a] - ts[b]);
            }
        }
        acc += w * vs[a];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_structure() {
        let m = time_mesh(20.0, 1e-2);
        assert_eq!(m[0], 0.0);
        assert_eq!(*m.last().unwrap(), 20.0);
        assert!(m.windows(2).all(|w| w[1] > w[0]));
        assert!(m.contains(&1.0) && m.contains(&2.0) && m.contains(&4.0) && m.contains(&8.0));
        let max_gap = m.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!((max_gap - 0.16).abs() < 1e-9);
        let short = time_mesh(0.35, 0.1);
        assert_eq!(short.len(), 5);
        assert_eq!(*short.last().unwrap(), 0.35);
    }

    #[test]
    fn interpolation_exact_on_cubics() {
        let times = time_mesh(3.0, 0.05);
        let f = |t: f64| 1.0 - 0.5 * t + 0.1 * t * t * t;
        let series: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        let tr = Trajectory::new(BackendKind::Grid, times, vec![0.0], vec![vec![series]]);
        for &t in &[0.0, 0.013, 0.999, 1.0, 1.37, 2.9999, 3.0] {
            assert!((tr.value(0, 0, t) - f(t)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn shifted_stencil_tracks_interpolation_error() {
        let times = time_mesh(2.0, 0.1);
        let f = |t: f64| (-3.0 * t).exp() * (5.0 * t).cos();
        let series: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        let tr = Trajectory::new(BackendKind::Grid, times, vec![0.0], vec![vec![series]]);
        for &t in &[0.05, 0.37, 0.95, 1.3, 1.97] {
            let err = (tr.value(0, 0, t) - f(t)).abs();
            let est = (tr.value(0, 0, t) - tr.value_shifted(0, 0, t)).abs();
            assert!(est > 0.0 && err < 2.0 * est, "t = {t}: err {err:e}, est {est:e}");
        }
    }
}
