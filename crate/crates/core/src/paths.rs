//! Seeded Brownian path ensembles and the Feynman–Kac weight
//! `exp(-∫_0^t V(X_s) ds)` accumulated along each path.
//!
//! Every (path, coordinate) pair draws from its own ChaCha stream, keyed by
//! the master seed and a coordinate tag, with the path (or antithetic pair)
//! index as the stream number. Work is cut into a fixed number of batches
//! whose boundaries depend only on `n_paths`, and batch results are
//! combined in batch order, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::potentials::{Potential, SeparablePotential};
use crate::stats::pairwise_sum;

/// Upper limit on independent batches; also the replica count used for
/// batch-means error estimates.
pub const MAX_BATCHES: usize = 32;

/// Stream tag offset for full-dimensional ensembles, keeping them
/// independent of the per-coordinate ensembles under the same seed.
pub(crate) const DIRECT_TAG: u64 = 1 << 32;
const SUP_TAG: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    #[serde(default)]
    pub antithetic: bool,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self { n_paths: 100_000, dt: 1e-3, horizon: 2.0, seed: 0, antithetic: false }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(invalid(format!("need at least 2 paths, got {}", self.n_paths)));
        }
        if self.antithetic && !self.n_paths.is_multiple_of(2) {
            return Err(invalid("antithetic sampling needs an even number of paths"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("path time step must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.dt > self.horizon {
            return Err(invalid(format!("time step {} exceeds horizon {}", self.dt, self.horizon)));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).ceil() as usize
    }

    fn paths_per_unit(&self) -> usize {
        if self.antithetic {
            2
        } else {
            1
        }
    }

    /// Number of independent sampling units (paths, or antithetic pairs).
    pub fn n_units(&self) -> usize {
        self.n_paths / self.paths_per_unit()
    }
}

/// Endpoint of one coordinate path together with `-∫_0^t V_i(X_s) ds`
/// (trapezoidal rule on the path grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEndpoint {
    pub endpoint: f64,
    pub log_weight: f64,
}

impl WeightedEndpoint {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

pub(crate) fn stream_rng(seed: u64, tag: u64, unit: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(b"fk-paths");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(unit);
    rng
}

/// Path time grid: the uniform `dt` grid merged with the recording times.
#[derive(Debug, Clone)]
pub(crate) struct TimeGrid {
    steps: Vec<f64>,
    sqrt_steps: Vec<f64>,
    /// For each recording time, the index of the step after which it is reached.
    record_after: Vec<usize>,
}

impl TimeGrid {
    pub(crate) fn new(dt: f64, record_times: &[f64]) -> Result<Self> {
        if record_times.is_empty() {
            return Err(invalid("no recording times"));
        }
        if record_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("recording times must be sorted"));
        }
        if !(record_times[0] > 0.0) {
            return Err(invalid(format!("recording times must be positive, got {}", record_times[0])));
        }
        let eps = 1e-9 * dt;
        let mut nodes: Vec<f64> = Vec::new();
        let mut record_after = Vec::with_capacity(record_times.len());
        let mut k = 1u64;
        let mut last = 0.0;
        for &rt in record_times {
            if rt <= last + eps && !nodes.is_empty() {
                record_after.push(nodes.len() - 1);
                continue;
            }
            loop {
                let u = k as f64 * dt;
                if u < rt - eps {
                    nodes.push(u);
                    k += 1;
                } else {
                    if (u - rt).abs() <= eps {
                        k += 1;
                    }
                    nodes.push(rt);
                    record_after.push(nodes.len() - 1);
                    last = rt;
                    break;
                }
            }
        }
        let mut steps = Vec::with_capacity(nodes.len());
        let mut prev = 0.0;
        for &t in &nodes {
            steps.push(t - prev);
            prev = t;
        }
        let sqrt_steps = steps.iter().map(|h| h.sqrt()).collect();
        Ok(Self { steps, sqrt_steps, record_after })
    }

    fn n_records(&self) -> usize {
        self.record_after.len()
    }
}

/// Walks one path and reports `(record index, point, per-coordinate V, log weight)`.
#[allow(clippy::too_many_arguments)]
fn walk<P: SeparablePotential + ?Sized>(
    potential: &P,
    start: &[f64],
    rngs: &mut [ChaCha8Rng],
    sign: f64,
    grid: &TimeGrid,
    point: &mut [f64],
    vals: &mut [f64],
    mut on_record: impl FnMut(usize, &[f64], &[f64], f64),
) {
    let d = start.len();
    point.copy_from_slice(start);
    let mut v_prev = 0.0;
    for c in 0..d {
        v_prev += potential.coordinate_value(c, point[c]);
    }
    let mut integral = 0.0;
    let mut rec = 0;
    let n_rec = grid.record_after.len();
    for (j, (&h, &sh)) in grid.steps.iter().zip(&grid.sqrt_steps).enumerate() {
        let s = sign * sh;
        let mut v = 0.0;
        for c in 0..d {
            let z: f64 = rngs[c].sample(StandardNormal);
            point[c] += s * z;
            let vc = potential.coordinate_value(c, point[c]);
            vals[c] = vc;
            v += vc;
        }
        integral += 0.5 * h * (v_prev + v);
        v_prev = v;
        while rec < n_rec && grid.record_after[rec] == j {
            on_record(rec, point, vals, -integral);
            rec += 1;
        }
        if rec == n_rec {
            break;
        }
    }
}

fn batch_bounds(n_units: usize) -> Vec<(usize, usize)> {
    let n_batches = n_units.clamp(1, MAX_BATCHES);
    (0..n_batches).map(|b| (b * n_units / n_batches, (b + 1) * n_units / n_batches)).collect()
}

/// Per-batch sums of observables at the recording times.
#[derive(Debug, Clone)]
pub(crate) struct EnsembleStats {
    n_obs: usize,
    batch_units: Vec<usize>,
    sums: Vec<Vec<f64>>,
    sumsq: Vec<Vec<f64>>,
}

impl EnsembleStats {
    fn idx(&self, ti: usize, obs: usize) -> usize {
        ti * self.n_obs + obs
    }

    pub(crate) fn n_units(&self) -> usize {
        self.batch_units.iter().sum()
    }

    pub(crate) fn mean(&self, ti: usize, obs: usize) -> f64 {
        let k = self.idx(ti, obs);
        let s: Vec<f64> = self.sums.iter().map(|b| b[k]).collect();
        pairwise_sum(&s) / self.n_units() as f64
    }

    pub(crate) fn std_error(&self, ti: usize, obs: usize) -> f64 {
        let k = self.idx(ti, obs);
        let n = self.n_units() as f64;
        let s: Vec<f64> = self.sums.iter().map(|b| b[k]).collect();
        let q: Vec<f64> = self.sumsq.iter().map(|b| b[k]).collect();
        let mean = pairwise_sum(&s) / n;
        let var = ((pairwise_sum(&q) - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    pub(crate) fn n_batches(&self) -> usize {
        self.batch_units.len()
    }

    pub(crate) fn batch_mean(&self, batch: usize, ti: usize, obs: usize) -> f64 {
        self.sums[batch][self.idx(ti, obs)] / self.batch_units[batch] as f64
    }
}

/// Runs the ensemble and accumulates `observe(point, V(X_t), V_i(X_t), weight, out)`.
pub(crate) fn simulate<P, F>(
    cfg: &PathConfig,
    potential: &P,
    start: &[f64],
    tag_base: u64,
    record_times: &[f64],
    n_obs: usize,
    observe: F,
) -> Result<EnsembleStats>
where
    P: SeparablePotential + ?Sized,
    F: Fn(&[f64], f64, &[f64], f64, &mut [f64]) + Sync,
{
    cfg.validate()?;
    if start.len() != potential.dim() {
        return Err(Error::DimensionMismatch { expected: potential.dim(), got: start.len() });
    }
    if let Some(&t) = record_times.last() {
        if t > cfg.horizon * (1.0 + 1e-12) {
            return Err(Error::BeyondHorizon { t, horizon: cfg.horizon });
        }
    }
    let grid = TimeGrid::new(cfg.dt, record_times)?;
    let d = start.len();
    let n_rec = grid.n_records();
    let width = n_rec * n_obs;
    let per_unit = cfg.paths_per_unit();
    let inv_per_unit = 1.0 / per_unit as f64;
    let bounds = batch_bounds(cfg.n_units());

    let results: Vec<(Vec<f64>, Vec<f64>)> = bounds
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sums = vec![0.0; width];
            let mut sumsq = vec![0.0; width];
            let mut unit = vec![0.0; width];
            let mut out = vec![0.0; n_obs];
            let mut point = vec![0.0; d];
            let mut vals = vec![0.0; d];
            for u in lo..hi {
                unit.iter_mut().for_each(|x| *x = 0.0);
                for twin in 0..per_unit {
                    let sign = if twin == 0 { 1.0 } else { -1.0 };
                    let mut rngs: Vec<ChaCha8Rng> =
                        (0..d).map(|c| stream_rng(cfg.seed, tag_base + c as u64, u as u64)).collect();
                    walk(potential, start, &mut rngs, sign, &grid, &mut point, &mut vals, |rec, pt, vs, lw| {
                        let v_total: f64 = vs.iter().sum();
                        observe(pt, v_total, vs, lw.exp(), &mut out);
                        for (o, val) in out.iter().enumerate() {
                            unit[rec * n_obs + o] += val * inv_per_unit;
                        }
                    });
                }
                for k in 0..width {
                    sums[k] += unit[k];
                    sumsq[k] += unit[k] * unit[k];
                }
            }
            (sums, sumsq)
        })
        .collect();

    let (sums, sumsq) = results.into_iter().unzip();
    Ok(EnsembleStats { n_obs, batch_units: bounds.iter().map(|(lo, hi)| hi - lo).collect(), sums, sumsq })
}

fn check_query_times(cfg: &PathConfig, times: &[f64]) -> Result<()> {
    cfg.validate()?;
    if times.is_empty() {
        return Err(invalid("no query times"));
    }
    for &t in times {
        if !(t > 0.0) {
            return Err(invalid(format!("query time must be positive, got {t}")));
        }
        if t > cfg.horizon * (1.0 + 1e-12) {
            return Err(Error::BeyondHorizon { t, horizon: cfg.horizon });
        }
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("query times must be sorted"));
    }
    Ok(())
}

/// Samples `n_paths` paths of coordinate `i` started at `start` and returns,
/// for every query time, the weighted endpoints of all paths.
///
/// With antithetic sampling, path `2k + 1` is the reflection of path `2k`
/// about `start`.
pub fn sample_paths_1d(
    cfg: &PathConfig,
    start: f64,
    potential: &Potential,
    i: usize,
    times: &[f64],
) -> Result<Vec<Vec<WeightedEndpoint>>> {
    check_query_times(cfg, times)?;
    let p1 = potential.restrict(i)?;
    let grid = TimeGrid::new(cfg.dt, times)?;
    let n_rec = grid.n_records();
    let per_unit = cfg.paths_per_unit();
    let per_path: Vec<Vec<WeightedEndpoint>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|path| {
            let unit = (path / per_unit) as u64;
            let sign = if path % per_unit == 0 { 1.0 } else { -1.0 };
            let mut rngs = [stream_rng(cfg.seed, i as u64, unit)];
            let mut rec = Vec::with_capacity(n_rec);
            let mut point = [0.0];
            let mut vals = [0.0];
            walk(&p1, &[start], &mut rngs, sign, &grid, &mut point, &mut vals, |_, pt, _, lw| {
                rec.push(WeightedEndpoint { endpoint: pt[0], log_weight: lw });
            });
            rec
        })
        .collect();
    Ok((0..n_rec).map(|k| per_path.iter().map(|p| p[k]).collect()).collect())
}

/// `sup_{s ≤ t} |B_s|` over the path grid for every query time, for
/// `n_paths` independent standard Brownian motions started at 0.
pub fn running_sup_samples(cfg: &PathConfig, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_query_times(cfg, times)?;
    let grid = TimeGrid::new(cfg.dt, times)?;
    let n_rec = grid.n_records();
    let per_path: Vec<Vec<f64>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(cfg.seed, SUP_TAG, path as u64);
            let mut x = 0.0f64;
            let mut sup = 0.0f64;
            let mut out = Vec::with_capacity(n_rec);
            let mut rec = 0;
            for (j, &sh) in grid.sqrt_steps.iter().enumerate() {
                let z: f64 = rng.sample(StandardNormal);
                x += sh * z;
                sup = sup.max(x.abs());
                while rec < n_rec && grid.record_after[rec] == j {
                    out.push(sup);
                    rec += 1;
                }
                if rec == n_rec {
                    break;
                }
            }
            out
        })
        .collect();
    Ok((0..n_rec).map(|k| per_path.iter().map(|p| p[k]).collect()).collect())
}

/// Monte Carlo estimate of `P(sup_{0≤s≤t} |X_s - start| ≥ radius)`.
///
/// The supremum is monitored on the path grid only, so the estimate is
/// biased low; the binomial standard error is reported alongside.
pub fn sup_deviation_probability(cfg: &PathConfig, start: f64, radius: f64, t: f64) -> Result<Estimate> {
    if !(radius > 0.0) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    if !start.is_finite() {
        return Err(invalid("start must be finite"));
    }
    // translation invariance: only the increments matter
    let sups = running_sup_samples(cfg, &[t])?;
    Ok(exceedance(&sups[0], radius))
}

/// Fraction of samples at or above `radius`, with binomial standard error.
pub fn exceedance(sups: &[f64], radius: f64) -> Estimate {
    let n = sups.len() as f64;
    let hits = sups.iter().filter(|&&s| s >= radius).count() as f64;
    let p = hits / n;
    Estimate { value: p, std_error: (p * (1.0 - p) / n).sqrt() }
}
