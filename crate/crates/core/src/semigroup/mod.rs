//! The semigroups `e^{-tL_i}` and `e^{-tL}` applied to `1` and to powers of
//! the potential.
//!
//! Two independent backends evaluate the one-dimensional factors:
//!
//! * Monte Carlo: the Feynman–Kac expectation
//!   `E_x[exp(-∫_0^t V_i(X_s) ds) f(X_t)]` over seeded Brownian paths;
//! * grid: the parabolic problem `∂_t u = ½∂²_x u - V_i u`, `u(0) = f`,
//!   solved by Crank–Nicolson with one refinement for an error estimate.
//!
//! `d`-dimensional values are assembled from one-dimensional factors:
//! `e^{-tL}1(x) = Π_i e^{-tL_i}1(x_i)` and
//! `e^{-tL}V(x) = Σ_i [Π_{j≠i} e^{-tL_j}1(x_j)] e^{-tL_i}V_i(x_i)`.

mod grid;
mod trajectory;

pub use grid::GridSolverConfig;
pub use trajectory::{time_mesh, Trajectory};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::paths::{simulate, PathConfig, DIRECT_TAG};
use crate::potentials::{Potential, SeparablePotential, TruncatedPotential};
use crate::special::normal_sf;
use grid::CrankNicolson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    MonteCarlo,
    Grid,
}

/// Resolution policy for the grid backend; the domain is sized per query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridOptions {
    pub n_cells: usize,
    pub dt_max: f64,
    pub min_x_max: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { n_cells: 2048, dt_max: 1e-3, min_x_max: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Backend {
    MonteCarlo(PathConfig),
    Grid(GridOptions),
}

impl Backend {
    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::MonteCarlo(_) => BackendKind::MonteCarlo,
            Backend::Grid(_) => BackendKind::Grid,
        }
    }

    pub fn grid() -> Self {
        Backend::Grid(GridOptions::default())
    }
}

/// An estimate of a semigroup value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemigroupValue {
    pub value: f64,
    /// Monte Carlo standard error (0 for the grid backend).
    pub std_error: f64,
    /// Grid refinement difference plus the absorbing-boundary leak bound
    /// (0 for Monte Carlo).
    pub discretization_error: f64,
    pub backend: BackendKind,
    pub t: f64,
    pub x: Vec<f64>,
}

impl SemigroupValue {
    fn exact(value: f64, backend: BackendKind, t: f64, x: Vec<f64>) -> Self {
        Self { value, std_error: 0.0, discretization_error: 0.0, backend, t, x }
    }

    /// `value + sigmas·std_error + discretization_error`.
    pub fn upper(&self, sigmas: f64) -> f64 {
        self.value + sigmas * self.std_error + self.discretization_error
    }

    /// `value - sigmas·std_error - discretization_error`.
    pub fn lower(&self, sigmas: f64) -> f64 {
        self.value - sigmas * self.std_error - self.discretization_error
    }
}

/// Initial datum of a one-dimensional semigroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Datum {
    One,
    /// `V_i^b`
    Power(f64),
}

impl Datum {
    #[inline]
    fn eval(self, v: f64) -> f64 {
        match self {
            Datum::One => 1.0,
            Datum::Power(b) => {
                if v == 0.0 {
                    0.0
                } else if b == 1.0 {
                    v
                } else {
                    v.powf(b)
                }
            }
        }
    }
}

/// Observables for full-dimensional Monte Carlo expectations
/// `E_x[exp(-∫V(X_s)ds) g(X_t)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    One,
    /// `g = V^a`
    PotentialPower(f64),
    /// `g = V^a 1{V < cap}`
    CappedPotentialPower {
        a: f64,
        cap: f64,
    },
}

impl Observable {
    #[inline]
    fn eval(self, v: f64) -> f64 {
        let pow = |a: f64| if v == 0.0 { 0.0 } else { v.powf(a) };
        match self {
            Observable::One => 1.0,
            Observable::PotentialPower(a) => pow(a),
            Observable::CappedPotentialPower { a, cap } => {
                if v < cap {
                    pow(a)
                } else {
                    0.0
                }
            }
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        Err(invalid(format!("time must be non-negative and finite, got {t}")))
    } else {
        Ok(())
    }
}

/// Distance beyond which `V_i = κ|x|^α` suppresses paths to below `e^{-27.6}`
/// (≈1e-12), from the WKB decay `exp(-∫√(2V))`.
fn kill_radius(alpha: f64, kappa: f64) -> f64 {
    if kappa <= 0.0 {
        return f64::INFINITY;
    }
    let beta = alpha / 2.0 + 1.0;
    (27.6 * beta / (2.0 * kappa).sqrt()).powf(1.0 / beta)
}

impl GridSolverConfig {
    /// Sizes the domain for a query at `|x| ≤ x_abs` up to time `t`:
    /// `X = max(min_x_max, 2|x|, |x| + min(8√t, r_kill) + 1)`.
    pub fn auto(opts: &GridOptions, kill: Option<(f64, f64)>, x_abs: f64, t: f64) -> Self {
        let reach = kill.map_or(f64::INFINITY, |(alpha, kappa)| kill_radius(alpha, kappa));
        let margin = (8.0 * t.sqrt()).min(reach);
        let x_max = opts.min_x_max.max(2.0 * x_abs).max(x_abs + margin + 1.0);
        let dt_solver = if t > 0.0 { opts.dt_max.min(t / 100.0) } else { opts.dt_max };
        Self { x_max, n_cells: opts.n_cells, dt_solver }
    }
}

/// Potential of one coordinate as seen by the grid solver.
struct CoordinateModel<'a, P: SeparablePotential> {
    potential: &'a P,
    coordinate: usize,
    kill: Option<(f64, f64)>,
}

impl<'a> CoordinateModel<'a, Potential> {
    fn plain(p: &'a Potential, i: usize) -> Result<Self> {
        p.eval_coordinate(i, 0.0)?;
        Ok(Self { potential: p, coordinate: i, kill: Some((p.alpha(), p.coefficients()[i])) })
    }
}

impl<'a> CoordinateModel<'a, TruncatedPotential> {
    fn truncated(p: &'a TruncatedPotential, i: usize) -> Result<Self> {
        p.eval_coordinate(i, 0.0)?;
        Ok(Self { potential: p, coordinate: i, kill: None })
    }
}

impl<P: SeparablePotential> CoordinateModel<'_, P> {
    fn v(&self, x: f64) -> f64 {
        self.potential.coordinate_value(self.coordinate, x)
    }

    fn solver(&self, cfg: &GridSolverConfig) -> CrankNicolson {
        CrankNicolson::new(cfg.x_max, cfg.n_cells, |x| self.v(x))
    }

    /// Coarse and refined solutions at `times` and `xs`, returning the
    /// refined values and `|fine - coarse|`.
    fn refined_values(
        &self,
        datum: Datum,
        cfg: &GridSolverConfig,
        times: &[f64],
        xs: &[f64],
        steps: impl Fn(f64, f64, f64) -> usize,
    ) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let run = |c: &GridSolverConfig| {
            let cn = self.solver(c);
            let u0 = cn.sample(|x| datum.eval(self.v(x)));
            let mut prev = 0.0;
            let n: Vec<usize> = times
                .iter()
                .map(|&t| {
                    let k = steps(prev, t, c.dt_solver);
                    prev = t;
                    k
                })
                .collect();
            cn.march(&u0, times, &n, xs)
        };
        let coarse = run(cfg);
        let fine = run(&cfg.refined());
        let diff =
            fine.iter().zip(&coarse).map(|(f, c)| f.iter().zip(c).map(|(a, b)| (a - b).abs()).collect()).collect();
        (fine, diff)
    }

    fn grid_value(&self, datum: Datum, x: f64, t: f64, cfg: &GridSolverConfig) -> Result<SemigroupValue> {
        cfg.validate()?;
        check_time(t)?;
        cfg.check_query(x)?;
        if t == 0.0 {
            return Ok(SemigroupValue::exact(datum.eval(self.v(x)), BackendKind::Grid, 0.0, vec![x]));
        }
        let (fine, diff) =
            self.refined_values(datum, cfg, &[t], &[x], |t0, t1, dt| ((t1 - t0) / dt).ceil().max(1.0) as usize);
        let (value, diff) = (fine[0][0], diff[0][0]);
        if diff > 1e-2 * value.abs() + 1e-8 {
            return Err(Error::NonConvergentRefinement { t, x, coarse: value - diff, fine: value });
        }
        // paths reaching the absorbing boundary carry at most sup(datum)
        let datum_sup = datum.eval(self.v(cfg.x_max));
        let leak = datum_sup * 4.0 * normal_sf((cfg.x_max - x.abs()) / t.sqrt());
        Ok(SemigroupValue {
            value,
            std_error: 0.0,
            discretization_error: diff + leak,
            backend: BackendKind::Grid,
            t,
            x: vec![x],
        })
    }

    fn mc_value(&self, datum: Datum, x: f64, t: f64, cfg: &PathConfig) -> Result<SemigroupValue> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(SemigroupValue::exact(datum.eval(self.v(x)), BackendKind::MonteCarlo, 0.0, vec![x]));
        }
        let single = SingleCoordinate(self);
        let stats = simulate(cfg, &single, &[x], self.coordinate as u64, &[t], 1, |_, _, vs, w, out| {
            out[0] = w * datum.eval(vs[0]);
        })?;
        Ok(SemigroupValue {
            value: stats.mean(0, 0),
            std_error: stats.std_error(0, 0),
            discretization_error: 0.0,
            backend: BackendKind::MonteCarlo,
            t,
            x: vec![x],
        })
    }

    fn value(&self, datum: Datum, x: f64, t: f64, backend: &Backend) -> Result<SemigroupValue> {
        match backend {
            Backend::MonteCarlo(cfg) => self.mc_value(datum, x, t, cfg),
            Backend::Grid(opts) => self.grid_value(datum, x, t, &GridSolverConfig::auto(opts, self.kill, x.abs(), t)),
        }
    }

    /// Tabulates the semigroup on `mesh` (which starts at 0) at every `x`.
    fn trajectory(&self, datum: Datum, xs: &[f64], mesh: &[f64], backend: &Backend) -> Result<Trajectory> {
        let out_times = &mesh[1..];
        let t_end = *mesh.last().ok_or_else(|| invalid("empty time mesh"))?;
        let initial: Vec<f64> = xs.iter().map(|&x| datum.eval(self.v(x))).collect();
        let with_initial = |rows: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            // [time][x] -> [x][time], prepending t = 0
            (0..xs.len()).map(|j| std::iter::once(initial[j]).chain(rows.iter().map(|r| r[j])).collect()).collect()
        };
        match backend {
            Backend::Grid(opts) => {
                if let Some(w) = mesh.windows(2).find(|w| w[1] - w[0] > 16.0 * opts.dt_max * (1.0 + 1e-9)) {
                    return Err(invalid(format!(
                        "mesh interval [{}, {}] longer than 16·dt_max = {}",
                        w[0],
                        w[1],
                        16.0 * opts.dt_max
                    )));
                }
                let x_abs = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let cfg = GridSolverConfig::auto(opts, self.kill, x_abs, t_end);
                cfg.validate()?;
                let run = |c: &GridSolverConfig, substeps: usize| {
                    let cn = self.solver(c);
                    let u0 = cn.sample(|x| datum.eval(self.v(x)));
                    cn.march(&u0, out_times, &vec![substeps; out_times.len()], xs)
                };
                let coarse = run(&cfg, 1);
                let fine = run(&cfg.refined(), 2);
                Ok(Trajectory::new(
                    BackendKind::Grid,
                    mesh.to_vec(),
                    xs.to_vec(),
                    vec![with_initial(fine), with_initial(coarse)],
                ))
            }
            Backend::MonteCarlo(cfg) => {
                let single = SingleCoordinate(self);
                let mut replicas: Vec<Vec<Vec<f64>>> = Vec::new();
                for &x in xs {
                    let stats =
                        simulate(cfg, &single, &[x], self.coordinate as u64, out_times, 1, |_, _, vs, w, out| {
                            out[0] = w * datum.eval(vs[0]);
                        })?;
                    let x0 = datum.eval(self.v(x));
                    let n_rep = 1 + stats.n_batches();
                    if replicas.is_empty() {
                        replicas = vec![Vec::new(); n_rep];
                    }
                    let mean: Vec<f64> =
                        std::iter::once(x0).chain((0..out_times.len()).map(|k| stats.mean(k, 0))).collect();
                    replicas[0].push(mean);
                    for b in 0..stats.n_batches() {
                        let series = std::iter::once(x0)
                            .chain((0..out_times.len()).map(|k| stats.batch_mean(b, k, 0)))
                            .collect();
                        replicas[b + 1].push(series);
                    }
                }
                Ok(Trajectory::new(BackendKind::MonteCarlo, mesh.to_vec(), xs.to_vec(), replicas))
            }
        }
    }
}

/// Exposes coordinate `i` of a separable potential as a 1-D potential.
struct SingleCoordinate<'m, 'a, P: SeparablePotential>(&'m CoordinateModel<'a, P>);

impl<P: SeparablePotential> SeparablePotential for SingleCoordinate<'_, '_, P> {
    fn dim(&self) -> usize {
        1
    }

    fn coordinate_value(&self, _i: usize, xi: f64) -> f64 {
        self.0.v(xi)
    }
}

/// `e^{-tL_i}1(x)` by Monte Carlo.
pub fn semigroup_one_1d_mc(p: &Potential, i: usize, x: f64, t: f64, cfg: &PathConfig) -> Result<SemigroupValue> {
    CoordinateModel::plain(p, i)?.mc_value(Datum::One, x, t, cfg)
}

/// `e^{-tL_i}1(x)` on an explicitly configured grid.
pub fn semigroup_one_1d_grid(
    p: &Potential,
    i: usize,
    x: f64,
    t: f64,
    cfg: &GridSolverConfig,
) -> Result<SemigroupValue> {
    CoordinateModel::plain(p, i)?.grid_value(Datum::One, x, t, cfg)
}

/// `e^{-tL_i}1(x)` with the chosen backend (grid domain sized automatically).
pub fn semigroup_one_1d(p: &Potential, i: usize, x: f64, t: f64, backend: &Backend) -> Result<SemigroupValue> {
    CoordinateModel::plain(p, i)?.value(Datum::One, x, t, backend)
}

/// `e^{-tL_i}(V_i^a)(x)`.
pub fn semigroup_power_1d(
    p: &Potential,
    i: usize,
    x: f64,
    t: f64,
    a: f64,
    backend: &Backend,
) -> Result<SemigroupValue> {
    if !(a > 0.0) {
        return Err(invalid(format!("power must be positive, got {a}")));
    }
    CoordinateModel::plain(p, i)?.value(Datum::Power(a), x, t, backend)
}

/// `e^{-tL_i^n}1(x)` for the truncated potential `min(V_i, n)`.
pub fn semigroup_one_truncated_1d(
    tp: &TruncatedPotential,
    i: usize,
    x: f64,
    t: f64,
    backend: &Backend,
) -> Result<SemigroupValue> {
    CoordinateModel::truncated(tp, i)?.value(Datum::One, x, t, backend)
}

/// `e^{-tL_i^n}(V_i^n)^a(x)` for the truncated potential.
pub fn semigroup_power_truncated_1d(
    tp: &TruncatedPotential,
    i: usize,
    x: f64,
    t: f64,
    a: f64,
    backend: &Backend,
) -> Result<SemigroupValue> {
    CoordinateModel::truncated(tp, i)?.value(Datum::Power(a), x, t, backend)
}

fn check_point(p: &Potential, x: &[f64]) -> Result<()> {
    if x.len() != p.dim() {
        Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() })
    } else {
        Ok(())
    }
}

/// `e^{-tL}1(x) = Π_i e^{-tL_i}1(x_i)`. Relative standard errors of the
/// factors add in quadrature; relative discretization errors add linearly.
pub fn semigroup_one_ddim(p: &Potential, x: &[f64], t: f64, backend: &Backend) -> Result<SemigroupValue> {
    check_point(p, x)?;
    check_time(t)?;
    let mut value = 1.0;
    let mut rel_var = 0.0;
    let mut rel_disc = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let f = semigroup_one_1d(p, i, xi, t, backend)?;
        value *= f.value;
        if f.value > 0.0 {
            rel_var += (f.std_error / f.value).powi(2);
            rel_disc += f.discretization_error / f.value;
        }
    }
    Ok(SemigroupValue {
        value,
        std_error: value * rel_var.sqrt(),
        discretization_error: value * rel_disc,
        backend: backend.kind(),
        t,
        x: x.to_vec(),
    })
}

/// `e^{-tL}(V)(x) = Σ_i [Π_{j≠i} e^{-tL_j}1(x_j)] · e^{-tL_i}(V_i)(x_i)`.
pub fn semigroup_v_ddim(p: &Potential, x: &[f64], t: f64, backend: &Backend) -> Result<SemigroupValue> {
    check_point(p, x)?;
    check_time(t)?;
    let d = x.len();
    let mut ones = Vec::with_capacity(d);
    let mut vs = Vec::with_capacity(d);
    for (i, &xi) in x.iter().enumerate() {
        ones.push(semigroup_one_1d(p, i, xi, t, backend)?);
        vs.push(semigroup_power_1d(p, i, xi, t, 1.0, backend)?);
    }
    let prod_except = |skip: &[usize]| -> f64 {
        ones.iter().enumerate().filter(|(j, _)| !skip.contains(j)).map(|(_, u)| u.value).product()
    };
    let mut value = 0.0;
    let mut var = 0.0;
    let mut disc = 0.0;
    for i in 0..d {
        let others = prod_except(&[i]);
        value += others * vs[i].value;
        var += (others * vs[i].std_error).powi(2);
        disc += others * vs[i].discretization_error;
    }
    // sensitivity to each factor e^{-tL_j}1
    for j in 0..d {
        let grad: f64 = (0..d).filter(|&i| i != j).map(|i| prod_except(&[i, j]) * vs[i].value).sum();
        var += (grad * ones[j].std_error).powi(2);
        disc += grad * ones[j].discretization_error;
    }
    Ok(SemigroupValue {
        value,
        std_error: var.sqrt(),
        discretization_error: disc,
        backend: backend.kind(),
        t,
        x: x.to_vec(),
    })
}

/// Full-dimensional Monte Carlo estimate of `E_x[exp(-∫_0^t V(X_s)ds) g(X_t)]`,
/// without any factorization. Uses streams disjoint from the per-coordinate
/// estimators.
pub fn direct_mc(p: &Potential, x: &[f64], t: f64, cfg: &PathConfig, observable: Observable) -> Result<SemigroupValue> {
    check_point(p, x)?;
    check_time(t)?;
    if t == 0.0 {
        let v = p.eval_total(x)?;
        return Ok(SemigroupValue::exact(observable.eval(v), BackendKind::MonteCarlo, 0.0, x.to_vec()));
    }
    let stats = simulate(cfg, p, x, DIRECT_TAG, &[t], 1, |_, v, _, w, out| out[0] = w * observable.eval(v))?;
    Ok(SemigroupValue {
        value: stats.mean(0, 0),
        std_error: stats.std_error(0, 0),
        discretization_error: 0.0,
        backend: BackendKind::MonteCarlo,
        t,
        x: x.to_vec(),
    })
}

/// Full-dimensional Monte Carlo trajectories of several observables on a
/// time mesh starting at 0. Replicas beyond the first are batch means.
pub fn direct_trajectories(
    p: &Potential,
    x: &[f64],
    mesh: &[f64],
    cfg: &PathConfig,
    observables: &[Observable],
) -> Result<Vec<Trajectory>> {
    check_point(p, x)?;
    let out_times = &mesh[1..];
    let n_obs = observables.len();
    let stats = simulate(cfg, p, x, DIRECT_TAG, out_times, n_obs, |_, v, _, w, out| {
        for (o, obs) in observables.iter().enumerate() {
            out[o] = w * obs.eval(v);
        }
    })?;
    let v0 = p.eval_total(x)?;
    Ok(observables
        .iter()
        .enumerate()
        .map(|(o, obs)| {
            let x0 = obs.eval(v0);
            let mut replicas =
                vec![vec![std::iter::once(x0).chain((0..out_times.len()).map(|k| stats.mean(k, o))).collect()]];
            for b in 0..stats.n_batches() {
                replicas.push(vec![std::iter::once(x0)
                    .chain((0..out_times.len()).map(|k| stats.batch_mean(b, k, o)))
                    .collect()]);
            }
            Trajectory::new(BackendKind::MonteCarlo, mesh.to_vec(), vec![0.0], replicas)
        })
        .collect())
}

/// Tabulates `t ↦ e^{-tL_i}(datum)(x)` for every `x` in `xs` on `mesh`
/// (which must start at 0).
///
/// On the grid backend each mesh interval is one Crank-Nicolson step, so
/// intervals may not exceed `16·dt_max`; build the mesh with [`time_mesh`].
pub fn coordinate_trajectory(
    p: &Potential,
    i: usize,
    datum: Datum,
    xs: &[f64],
    mesh: &[f64],
    backend: &Backend,
) -> Result<Trajectory> {
    if mesh.first() != Some(&0.0) || mesh.len() < 2 {
        return Err(invalid("time mesh must start at 0 and contain a positive time"));
    }
    CoordinateModel::plain(p, i)?.trajectory(datum, xs, mesh, backend)
}

/// Tabulates several one-dimensional trajectories that share a grid domain
/// at `xs` for a truncated coordinate.
pub fn truncated_trajectory(
    tp: &TruncatedPotential,
    i: usize,
    datum: Datum,
    xs: &[f64],
    mesh: &[f64],
    backend: &Backend,
) -> Result<Trajectory> {
    CoordinateModel::truncated(tp, i)?.trajectory(datum, xs, mesh, backend)
}

/// Grid values of `e^{-tL_i}(datum)` at several times sharing one march,
/// with uniform steps `τ ≤ dt` on every interval. Returns `(values,
/// refinement differences)`, both indexed `[time][x]`.
pub(crate) fn grid_series(
    p: &TruncatedPotential,
    i: usize,
    datum: Datum,
    xs: &[f64],
    times: &[f64],
    dt: f64,
    opts: &GridOptions,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let model = CoordinateModel::truncated(p, i)?;
    let model = CoordinateModel { kill: Some((p.base().alpha(), p.base().coefficients()[i])), ..model };
    let x_abs = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let t_end = *times.last().ok_or_else(|| invalid("no times"))?;
    let cfg = GridSolverConfig { dt_solver: dt, ..GridSolverConfig::auto(opts, model.kill, x_abs, t_end) };
    cfg.validate()?;
    Ok(model.refined_values(datum, &cfg, times, xs, |t0, t1, dt| ((t1 - t0) / dt).round().max(1.0) as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_mc() -> PathConfig {
        PathConfig { n_paths: 4000, dt: 1e-2, horizon: 2.0, seed: 11, antithetic: false }
    }

    #[test]
    fn zero_potential_is_identity_on_one() {
        let z = Potential::zero(3);
        let mc = semigroup_one_1d_mc(&z, 0, 0.4, 1.0, &quick_mc()).unwrap();
        assert_eq!(mc.value, 1.0);
        assert_eq!(mc.std_error, 0.0);
        let g = semigroup_one_1d(&z, 0, 0.0, 1.0, &Backend::grid()).unwrap();
        assert!((g.value - 1.0).abs() < 1e-6, "{}", g.value);
        let dd = semigroup_one_ddim(&z, &[0.1, 0.2, 0.3], 0.5, &Backend::grid()).unwrap();
        assert!((dd.value - 1.0).abs() < 1e-6);
        let pv = semigroup_power_1d(&z, 0, 1.0, 0.5, 0.7, &Backend::grid()).unwrap();
        assert_eq!(pv.value, 0.0);
        let vd = semigroup_v_ddim(&z, &[0.1, 0.2, 0.3], 0.5, &Backend::MonteCarlo(quick_mc())).unwrap();
        assert_eq!(vd.value, 0.0);
    }

    #[test]
    fn zero_time_returns_datum() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let v = semigroup_power_1d(&p, 0, 2.0, 0.0, 1.5, &Backend::grid()).unwrap();
        assert_eq!(v.value, 8.0);
        let mc = semigroup_one_1d_mc(&p, 0, 2.0, 0.0, &quick_mc()).unwrap();
        assert_eq!(mc.value, 1.0);
    }

    #[test]
    fn grid_query_outside_safe_region() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let cfg = GridSolverConfig { x_max: 4.0, n_cells: 256, dt_solver: 1e-3 };
        assert!(matches!(semigroup_one_1d_grid(&p, 0, 3.0, 0.5, &cfg), Err(Error::OutsideSafeRegion { .. })));
    }

    #[test]
    fn mc_time_beyond_horizon() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        assert!(matches!(semigroup_one_1d_mc(&p, 0, 0.0, 3.0, &quick_mc()), Err(Error::BeyondHorizon { .. })));
    }

    #[test]
    fn auto_domain_covers_query() {
        let opts = GridOptions::default();
        let cfg = GridSolverConfig::auto(&opts, Some((2.0, 1.0)), 4.0, 1.0);
        assert!(cfg.x_max >= 8.0 && cfg.safe_limit() >= 4.0);
        assert_eq!(cfg.dt_solver, 1e-3);
        let small = GridSolverConfig::auto(&opts, None, 0.0, 0.01);
        assert_eq!(small.dt_solver, 1e-4);
        assert_eq!(small.x_max, 8.0);
    }

    #[test]
    fn grid_values_decrease_in_time() {
        let p = Potential::constant(1.0, 1, 1.0).unwrap();
        let b = Backend::grid();
        let mut prev = 1.0;
        for &t in &[0.1, 0.5, 1.0, 2.0] {
            let v = semigroup_one_1d(&p, 0, 1.0, t, &b).unwrap();
            assert!(v.value > 0.0 && v.value < prev);
            prev = v.value;
        }
    }

    #[test]
    fn one_dimensional_v_assembly_matches_power() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let b = Backend::grid();
        let v = semigroup_v_ddim(&p, &[0.7], 0.6, &b).unwrap();
        let w = semigroup_power_1d(&p, 0, 0.7, 0.6, 1.0, &b).unwrap();
        assert!((v.value - w.value).abs() < 1e-15);
    }

    #[test]
    fn product_symmetry() {
        let p = Potential::constant(2.0, 2, 1.0).unwrap();
        let b = Backend::grid();
        let dd = semigroup_one_ddim(&p, &[0.8, 0.8], 0.7, &b).unwrap();
        let one = semigroup_one_1d(&p, 0, 0.8, 0.7, &b).unwrap();
        assert!((dd.value - one.value * one.value).abs() < 1e-15);
    }

    #[test]
    fn truncation_cap_zero_is_free_motion() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let tp = p.truncate(0.0).unwrap();
        let v = semigroup_one_truncated_1d(&tp, 0, 1.0, 0.5, &Backend::MonteCarlo(quick_mc())).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn dimension_checked() {
        let p = Potential::constant(2.0, 2, 1.0).unwrap();
        assert!(matches!(semigroup_one_ddim(&p, &[0.0], 1.0, &Backend::grid()), Err(Error::DimensionMismatch { .. })));
        assert!(semigroup_one_1d(&p, 2, 0.0, 1.0, &Backend::grid()).is_err());
        assert!(semigroup_one_1d(&p, 0, 0.0, -1.0, &Backend::grid()).is_err());
    }

    #[test]
    fn trajectory_agrees_with_single_queries() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let b = Backend::grid();
        let mesh = time_mesh(2.0, 1e-3);
        let tr = coordinate_trajectory(&p, 0, Datum::One, &[0.0, 1.0], &mesh, &b).unwrap();
        for &t in &[0.3, 1.0, 1.7] {
            let single = semigroup_one_1d(&p, 0, 1.0, t, &b).unwrap();
            assert!((tr.value(0, 1, t) - single.value).abs() < 1e-6 * single.value);
        }
        let coarse = [0.0, 0.1, 0.5];
        assert!(coordinate_trajectory(&p, 0, Datum::One, &[0.0], &coarse, &b).is_err());
    }
}
