//! Riesz transform functionals as Gamma-weighted time integrals of the
//! semigroup:
//!
//! * `R_V^a(1)(x) = V(x)^a/Γ(a) ∫_0^∞ e^{-tL}1(x) t^{a-1} dt`;
//! * `L^{-a}(V^a)(x) = 1/Γ(a) ∫_0^∞ e^{-tL}(V^a)(x) t^{a-1} dt`, `0 < a ≤ 1`.
//!
//! The integral is split at `N`. The head is integrated after the
//! substitution `t = u^{1/a}`, the body on `[N, T]` directly, and the
//! remainder beyond `T` is bounded using the large-time decay
//! `e^{-tL}1 ≤ e^{-λt}`, `λ = Σ_i δ_i`, and reported as error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::paths::PathConfig;
use crate::potentials::{Potential, SeparablePotential};
use crate::quad::{integrate_power_weight, QuadOptions, SplitIntegral};
use crate::semigroup::{
    coordinate_trajectory, direct_trajectories, time_mesh, Backend, BackendKind, Datum, Observable, Trajectory,
};
use crate::special::{exp_integral_e1_upper, gamma, gamma_q};
use crate::stats::mean_and_stderr;

/// Default distance of the cutoff beyond `N`, in units of `1/λ`.
pub const TAIL_DECAY_LENGTHS: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RieszParams {
    pub a: f64,
    pub split_n: f64,
    pub quad_rel_tol: f64,
    /// `T`; defaults to `N + 40/λ`.
    pub tail_cutoff: Option<f64>,
}

impl Default for RieszParams {
    fn default() -> Self {
        Self { a: 0.5, split_n: 1.0, quad_rel_tol: 1e-8, tail_cutoff: None }
    }
}

impl RieszParams {
    pub fn with_a(a: f64) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(invalid(format!("Riesz exponent must be positive, got {}", self.a)));
        }
        if !(self.split_n > 0.0 && self.split_n.is_finite()) {
            return Err(invalid(format!("split point must be positive, got {}", self.split_n)));
        }
        if !(self.quad_rel_tol > 0.0) {
            return Err(invalid("quadrature tolerance must be positive"));
        }
        if let Some(t) = self.tail_cutoff {
            if !(t > self.split_n) {
                return Err(invalid(format!("tail cutoff {t} must exceed the split point {}", self.split_n)));
            }
        }
        Ok(())
    }

    fn quad_options(&self) -> QuadOptions {
        QuadOptions { rel_tol: self.quad_rel_tol, abs_tol: 1e-15, ..QuadOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszValue {
    pub value: f64,
    /// Contribution of `(0, N]`.
    pub lower: f64,
    /// Contribution of `[N, T]`.
    pub upper: f64,
    /// Quadrature error estimate plus `tail_bound`.
    pub quadrature_error: f64,
    pub statistical_error: f64,
    pub discretization_error: f64,
    /// Bound on the omitted contribution of `[T, ∞)`.
    pub tail_bound: f64,
    pub tail_cutoff: f64,
}

impl RieszValue {
    fn zero(tail_cutoff: f64) -> Self {
        Self {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            quadrature_error: 0.0,
            statistical_error: 0.0,
            discretization_error: 0.0,
            tail_bound: 0.0,
            tail_cutoff,
        }
    }

    /// `quadrature_error + sigmas·statistical_error + discretization_error`.
    pub fn combined_error(&self, sigmas: f64) -> f64 {
        self.quadrature_error + sigmas * self.statistical_error + self.discretization_error
    }
}

/// The adjoint functional: the Hölder form `∫(e^{-tL}V)^a`, which is the
/// value for `a = 1`, and the subadditive form `∫Σ_i e^{-tL}(V_i^a)`; both
/// dominate `∫e^{-tL}(V^a)`. `direct` is the full-dimensional Monte Carlo
/// integral of `e^{-tL}(V^a)` when a path backend is used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointValue {
    pub holder: RieszValue,
    pub subadditive: RieszValue,
    pub direct: Option<RieszValue>,
}

/// Large-time decay rate `δ` with `e^{-tL_i}1(x) ≤ e^{-δt}` on the fitted
/// nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub delta: f64,
    /// `(t, x, one-sided value)` at every node.
    pub nodes: Vec<(f64, f64, f64)>,
}

fn mesh_base(backend: &Backend) -> f64 {
    match backend {
        Backend::Grid(opts) => opts.dt_max,
        Backend::MonteCarlo(cfg) => cfg.dt,
    }
}

/// Splits the first mesh interval geometrically. `e^{-tL_i}V_i` behaves like
/// `t^{α/2}` at `x_i = 0`, which the uniform start of the mesh interpolates
/// poorly.
fn grade_start(mesh: &mut Vec<f64>) {
    const LEVELS: i32 = 12;
    let h = mesh[1];
    let extra = (1..=LEVELS).rev().map(|k| h * 2f64.powi(-k));
    mesh.splice(1..1, extra);
}

fn horizon(backend: &Backend) -> f64 {
    match backend {
        Backend::Grid(_) => f64::INFINITY,
        Backend::MonteCarlo(cfg) => cfg.horizon,
    }
}

/// Fits `δ = min -log(u + 3σ + disc)/t` for `u = e^{-tL_i}1(x)` over
/// `t ∈ {N, 2N, 3N, 4N}` (those within reach of the backend) and `x ∈ xs`.
pub fn fit_decay_rate(p: &Potential, i: usize, split_n: f64, xs: &[f64], backend: &Backend) -> Result<DecayFit> {
    if !(split_n > 0.0) {
        return Err(invalid("split point must be positive"));
    }
    let times: Vec<f64> = (1..=4).map(|k| k as f64 * split_n).filter(|&t| t <= horizon(backend)).collect();
    let Some(&t_end) = times.last() else {
        return Err(Error::RemainderUnavailable(format!(
            "decay fit needs t >= {split_n} but the path horizon is {}",
            horizon(backend)
        )));
    };
    let abs_xs: Vec<f64> = dedup_sorted(xs.iter().map(|x| x.abs()).collect());
    let tr = coordinate_trajectory(p, i, Datum::One, &abs_xs, &time_mesh(t_end, mesh_base(backend)), backend)?;
    let mut delta = f64::INFINITY;
    let mut nodes = Vec::new();
    for &t in &times {
        for (k, &x) in abs_xs.iter().enumerate() {
            let (se, disc) = tr.errors(k, t);
            let upper = (tr.value(0, k, t) + 3.0 * se + disc).min(1.0);
            nodes.push((t, x, upper));
            delta = delta.min(-upper.ln() / t);
        }
    }
    Ok(DecayFit { delta, nodes })
}

fn dedup_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

struct CoordinateTables {
    one: Trajectory,
    /// `e^{-tL_i}V_i`
    v: Option<Trajectory>,
    /// `e^{-tL_i}(V_i^a)`
    va: Option<Trajectory>,
}

/// Shared semigroup tables for evaluating the functionals at many points
/// whose dimensions are prefixes of one potential.
pub struct RieszEvaluator {
    potential: Potential,
    params: RieszParams,
    backend: Backend,
    /// table index per coordinate
    table_of: Vec<usize>,
    tables: Vec<CoordinateTables>,
    xs: Vec<Vec<f64>>,
    delta: Vec<f64>,
    t_end: f64,
}

impl RieszEvaluator {
    /// Tabulates every coordinate at the `|x_i|` occurring in `points`.
    /// With `adjoint`, also tabulates `e^{-tL_i}V_i` and `e^{-tL_i}(V_i^a)`.
    pub fn new(
        p: &Potential,
        backend: &Backend,
        params: &RieszParams,
        points: &[Vec<f64>],
        adjoint: bool,
    ) -> Result<Self> {
        params.validate()?;
        if adjoint && params.a > 1.0 {
            return Err(invalid(format!("adjoint functional requires a <= 1, got {}", params.a)));
        }
        let d_max = points.iter().map(Vec::len).max().ok_or_else(|| invalid("no evaluation points"))?;
        let d_min = points.iter().map(Vec::len).min().unwrap_or(0);
        if d_min == 0 {
            return Err(invalid("evaluation points must have at least one coordinate"));
        }
        if d_max > p.dim() {
            return Err(Error::DimensionMismatch { expected: p.dim(), got: d_max });
        }
        let potential = p.prefix(d_max)?;
        let mut evaluator = Self {
            potential,
            params: *params,
            backend: *backend,
            table_of: Vec::new(),
            tables: Vec::new(),
            xs: Vec::new(),
            delta: vec![0.0; d_max],
            t_end: params.tail_cutoff.unwrap_or(params.split_n),
        };
        if evaluator.potential.is_degenerate() {
            return Ok(evaluator);
        }

        // identical coordinates share a deterministic table; Monte Carlo
        // factors keep their own streams
        let kappas = evaluator.potential.coefficients().to_vec();
        let mut representatives: Vec<usize> = Vec::new();
        for i in 0..d_max {
            let shared = match backend.kind() {
                BackendKind::Grid => representatives.iter().position(|&r| kappas[r] == kappas[i]),
                BackendKind::MonteCarlo => None,
            };
            match shared {
                Some(k) => evaluator.table_of.push(k),
                None => {
                    evaluator.table_of.push(representatives.len());
                    representatives.push(i);
                }
            }
        }
        let mut xs: Vec<Vec<f64>> = vec![Vec::new(); representatives.len()];
        for x in points {
            for (i, xi) in x.iter().enumerate() {
                xs[evaluator.table_of[i]].push(xi.abs());
            }
        }
        let xs: Vec<Vec<f64>> = xs.into_iter().map(dedup_sorted).collect();

        let decay: Vec<f64> = representatives
            .par_iter()
            .map(|&i| fit_decay_rate(&evaluator.potential, i, params.split_n, &[0.0], backend).map(|f| f.delta))
            .collect::<Result<_>>()?;
        for i in 0..d_max {
            evaluator.delta[i] = decay[evaluator.table_of[i]];
            if !(evaluator.delta[i] > 0.0) {
                return Err(Error::RemainderUnavailable(format!("no large-time decay resolved for coordinate {i}")));
            }
        }
        let lambda_min: f64 = evaluator.delta[..d_min].iter().sum();
        let t_end = params.tail_cutoff.unwrap_or(params.split_n + TAIL_DECAY_LENGTHS / lambda_min);
        evaluator.t_end = t_end.min(horizon(backend));
        let mut mesh = time_mesh(evaluator.t_end, mesh_base(backend));
        if let Backend::Grid(_) = backend {
            grade_start(&mut mesh);
        }

        let p_ref = &evaluator.potential;
        let a = params.a;
        evaluator.tables = representatives
            .par_iter()
            .zip(&xs)
            .map(|(&i, xs)| -> Result<CoordinateTables> {
                let one = coordinate_trajectory(p_ref, i, Datum::One, xs, &mesh, backend)?;
                let (v, va) = if adjoint {
                    let v = coordinate_trajectory(p_ref, i, Datum::Power(1.0), xs, &mesh, backend)?;
                    let va = if a < 1.0 {
                        Some(coordinate_trajectory(p_ref, i, Datum::Power(a), xs, &mesh, backend)?)
                    } else {
                        None
                    };
                    (Some(v), va)
                } else {
                    (None, None)
                };
                Ok(CoordinateTables { one, v, va })
            })
            .collect::<Result<_>>()?;
        evaluator.xs = xs;
        Ok(evaluator)
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn params(&self) -> &RieszParams {
        &self.params
    }

    /// End of the tabulated time range.
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Per-coordinate decay rates `δ_i`.
    pub fn decay_rates(&self) -> &[f64] {
        &self.delta
    }

    fn locate(&self, x: &[f64]) -> Result<Vec<(usize, usize)>> {
        if x.is_empty() || x.len() > self.potential.dim() {
            return Err(Error::DimensionMismatch { expected: self.potential.dim(), got: x.len() });
        }
        x.iter()
            .enumerate()
            .map(|(i, xi)| {
                let k = self.table_of[i];
                let j = self.tables[k]
                    .one
                    .index_of(xi.abs())
                    .ok_or_else(|| invalid(format!("coordinate {i} was not tabulated at {xi}")))?;
                Ok((k, j))
            })
            .collect()
    }

    fn cutoff_for(&self, d: usize) -> (f64, f64) {
        let lambda: f64 = self.delta[..d].iter().sum();
        let t = self.params.tail_cutoff.unwrap_or(self.params.split_n + TAIL_DECAY_LENGTHS / lambda);
        (lambda, t.min(self.t_end))
    }

    fn replicas(&self) -> usize {
        self.tables.first().map_or(1, |t| t.one.n_replicas())
    }

    /// Integrates `f(replica, shifted, t) t^{a-1}` for every replica and
    /// combines the replica spread into statistical or discretization error.
    /// The integral of the shifted-stencil interpolant adds an estimate of
    /// the time interpolation error to the discretization error.
    fn integrate_replicas(
        &self,
        a: f64,
        cutoff: f64,
        f: impl Fn(usize, bool, f64) -> f64 + Sync,
    ) -> Result<(SplitIntegral, f64, f64)> {
        let opts = self.params.quad_options();
        let n = self.params.split_n;
        let main = integrate_power_weight(|t| f(0, false, t), a, n, cutoff, &opts)?;
        let shifted = integrate_power_weight(|t| f(0, true, t), a, n, cutoff, &opts)?.value();
        let others: Vec<f64> = (1..self.replicas())
            .into_par_iter()
            .map(|r| integrate_power_weight(|t| f(r, false, t), a, n, cutoff, &opts).map(|s| s.value()))
            .collect::<Result<_>>()?;
        let interp = (main.value() - shifted).abs();
        let (stat, disc) = match self.backend.kind() {
            BackendKind::Grid => (0.0, others.first().map_or(0.0, |c| (main.value() - c).abs()) + interp),
            BackendKind::MonteCarlo => (mean_and_stderr(&others).1, interp),
        };
        Ok((main, stat, disc))
    }

    /// `R_V^a(1)(x)` for `x` of any dimension up to the tabulated one.
    pub fn riesz_one(&self, x: &[f64]) -> Result<RieszValue> {
        self.riesz_one_with_exponent(x, self.params.a)
    }

    /// `R_V^a(1)(x)` for another exponent; the `e^{-tL}1` tables do not
    /// depend on `a`.
    pub fn riesz_one_with_exponent(&self, x: &[f64], a: f64) -> Result<RieszValue> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid(format!("Riesz exponent must be positive, got {a}")));
        }
        if self.potential.is_degenerate() {
            return Ok(RieszValue::zero(self.t_end));
        }
        let loc = self.locate(x)?;
        let v: f64 = x.iter().enumerate().map(|(i, &xi)| self.potential.coordinate_value(i, xi)).sum();
        let (lambda, cutoff) = self.cutoff_for(x.len());
        if v == 0.0 {
            return Ok(RieszValue::zero(cutoff));
        }
        let scale = v.powf(a) / gamma(a);
        let product = |r: usize, shifted: bool, t: f64| {
            loc.iter().map(|&(k, j)| interp(&self.tables[k].one, r, j, t, shifted)).product::<f64>()
        };
        let (main, stat, disc) = self.integrate_replicas(a, cutoff, product)?;
        // V^a/Γ(a) ∫_T^∞ e^{-λt} t^{a-1} dt
        let tail = v.powf(a) * gamma_q(a, lambda * cutoff) / lambda.powf(a);
        Ok(RieszValue {
            value: scale * main.value(),
            lower: scale * main.lower.value,
            upper: scale * main.upper.value,
            quadrature_error: scale * main.error() + tail,
            statistical_error: scale * stat,
            discretization_error: scale * disc,
            tail_bound: tail,
            tail_cutoff: cutoff,
        })
    }

    /// `L^{-a}(V^a)(x)` through the factorized `e^{-tL}V` and
    /// `e^{-tL}(V_i^a)`. Requires tables built with `adjoint = true`.
    pub fn adjoint(&self, x: &[f64]) -> Result<AdjointValue> {
        if self.potential.is_degenerate() {
            let z = RieszValue::zero(self.t_end);
            return Ok(AdjointValue { holder: z.clone(), subadditive: z, direct: None });
        }
        let loc = self.locate(x)?;
        if self.tables.iter().any(|t| t.v.is_none()) {
            return Err(invalid("evaluator was built without adjoint tables"));
        }
        let a = self.params.a;
        let (lambda, cutoff) = self.cutoff_for(x.len());
        let d = x.len();

        // Σ_i Π_{j≠i} u_j · g_i, with prefix/suffix products
        let assemble = |r: usize, sh: bool, t: f64, second: &dyn Fn(&CoordinateTables) -> &Trajectory| -> f64 {
            let u: Vec<f64> = loc.iter().map(|&(k, j)| interp(&self.tables[k].one, r, j, t, sh)).collect();
            let mut suffix = vec![1.0; d + 1];
            for i in (0..d).rev() {
                suffix[i] = suffix[i + 1] * u[i];
            }
            let mut prefix = 1.0;
            let mut acc = 0.0;
            for (i, &(k, j)) in loc.iter().enumerate() {
                acc += prefix * suffix[i + 1] * interp(second(&self.tables[k]), r, j, t, sh);
                prefix *= u[i];
            }
            acc
        };
        let holder_f = |r: usize, sh: bool, t: f64| assemble(r, sh, t, &|tb| tb.v.as_ref().unwrap()).max(0.0).powf(a);
        let sub_f = |r: usize, sh: bool, t: f64| assemble(r, sh, t, &|tb| tb.va.as_ref().or(tb.v.as_ref()).unwrap());

        let holder_tail = adjoint_tail_bound(a, lambda, cutoff);
        // termwise Hölder plus the power mean: Σ_i e^{-tL}(V_i^a) ≤ d^{1-a}(e^{-tL}V)^a
        let sub_tail = (d as f64).powf(1.0 - a) * holder_tail;

        let build = |f: &(dyn Fn(usize, bool, f64) -> f64 + Sync), tail: f64| -> Result<RieszValue> {
            let (main, stat, disc) = self.integrate_replicas(a, cutoff, f)?;
            let scale = 1.0 / gamma(a);
            Ok(RieszValue {
                value: scale * main.value(),
                lower: scale * main.lower.value,
                upper: scale * main.upper.value,
                quadrature_error: scale * main.error() + tail,
                statistical_error: scale * stat,
                discretization_error: scale * disc,
                tail_bound: tail,
                tail_cutoff: cutoff,
            })
        };
        let holder = build(&holder_f, holder_tail)?;
        let subadditive = build(&sub_f, sub_tail)?;
        Ok(AdjointValue { holder, subadditive, direct: None })
    }
}

fn interp(tr: &Trajectory, replica: usize, xi: usize, t: f64, shifted: bool) -> f64 {
    if shifted {
        tr.value_shifted(replica, xi, t)
    } else {
        tr.value(replica, xi, t)
    }
}

/// `1/Γ(a) ∫_T^∞ (e^{-tL}V)^a t^{a-1} dt ≤ (2e^{-λT/2})^a E_1(aλT/(2(1-a)))^{1-a}/Γ(a)`,
/// by Hölder's inequality with `e^{-tL}V = -∂_t e^{-tL}1` and `e^{-tL}1 ≤ e^{-λt}`.
/// For `a = 1` the integral telescopes to `e^{-TL}1 ≤ e^{-λT}`.
fn adjoint_tail_bound(a: f64, lambda: f64, cutoff: f64) -> f64 {
    let bound = if a == 1.0 {
        (-lambda * cutoff).exp()
    } else {
        let z = a * lambda * cutoff / (2.0 * (1.0 - a));
        (2.0 * (-lambda * cutoff / 2.0).exp()).powf(a) * exp_integral_e1_upper(z).powf(1.0 - a)
    };
    bound / gamma(a)
}

/// `R_V^a(1)(x) = V(x)^a/Γ(a) ∫_0^∞ e^{-tL}1(x) t^{a-1} dt`.
pub fn riesz_one(p: &Potential, x: &[f64], rp: &RieszParams, backend: &Backend) -> Result<RieszValue> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    RieszEvaluator::new(p, backend, rp, &[x.to_vec()], false)?.riesz_one(x)
}

/// `L^{-a}(V^a)(x)` for `0 < a ≤ 1`. With a Monte Carlo backend the
/// full-dimensional estimate is reported alongside the factorized forms.
pub fn adjoint_functional(p: &Potential, x: &[f64], rp: &RieszParams, backend: &Backend) -> Result<AdjointValue> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    let ev = RieszEvaluator::new(p, backend, rp, &[x.to_vec()], true)?;
    let mut out = ev.adjoint(x)?;
    if let (Backend::MonteCarlo(cfg), false) = (backend, p.is_degenerate()) {
        let lambda: f64 = ev.decay_rates().iter().sum();
        let direct = direct_time_integrals(p, x, rp, cfg, &[(Observable::PotentialPower(rp.a), None)])?;
        let mut value = direct.into_iter().next().expect("one observable");
        // e^{-tL}(V^a) ≤ (e^{-tL}V)^a, so the Hölder-form tail also bounds this one
        let tail = adjoint_tail_bound(rp.a, lambda, value.tail_cutoff);
        value.tail_bound = tail;
        value.quadrature_error += tail;
        out.direct = Some(value);
    }
    Ok(out)
}

/// Full-dimensional Monte Carlo integrals `1/Γ(a) ∫_0^H g_k(t) t^{a-1} dt`
/// with `g_k(t) = E_x[e^{-∫V} obs_k(X_t)] · e^{-t/r_k}` (no damping when
/// `r_k` is `None`), over the path horizon `H` (or the tail cutoff, if
/// smaller). All observables share one ensemble. `tail_bound` is left at 0.
pub fn direct_time_integrals(
    p: &Potential,
    x: &[f64],
    rp: &RieszParams,
    cfg: &PathConfig,
    observables: &[(Observable, Option<f64>)],
) -> Result<Vec<RieszValue>> {
    rp.validate()?;
    let cutoff = rp.tail_cutoff.unwrap_or(f64::INFINITY).min(cfg.horizon);
    let mesh = time_mesh(cutoff, cfg.dt);
    let obs: Vec<Observable> = observables.iter().map(|o| o.0).collect();
    let trajectories = direct_trajectories(p, x, &mesh, cfg, &obs)?;
    let opts = rp.quad_options();
    let a = rp.a;
    let scale = 1.0 / gamma(a);
    trajectories
        .iter()
        .zip(observables)
        .map(|(tr, &(_, damping))| {
            let damp = |t: f64| damping.map_or(1.0, |r| (-t / r).exp());
            let integral =
                |r: usize| integrate_power_weight(|t| tr.value(r, 0, t) * damp(t), a, rp.split_n, cutoff, &opts);
            let main = integral(0)?;
            let batches: Vec<f64> =
                (1..tr.n_replicas()).map(|r| integral(r).map(|s| s.value())).collect::<Result<_>>()?;
            Ok(RieszValue {
                value: scale * main.value(),
                lower: scale * main.lower.value,
                upper: scale * main.upper.value,
                quadrature_error: scale * main.error(),
                statistical_error: scale * mean_and_stderr(&batches).1,
                discretization_error: 0.0,
                tail_bound: 0.0,
                tail_cutoff: cutoff,
            })
        })
        .collect()
}

/// The regularized adjoint `1/Γ(a) ∫ e^{-tL}(V^a 1{V<cap})(x) t^{a-1} e^{-t/cap} dt`
/// for each cap, next to the unregularized integrand, all from one
/// ensemble and over the path horizon. Returns `(unregularized, per cap)`.
pub fn regularized_adjoint_mc(
    p: &Potential,
    x: &[f64],
    rp: &RieszParams,
    cfg: &PathConfig,
    caps: &[f64],
) -> Result<(RieszValue, Vec<RieszValue>)> {
    if caps.iter().any(|&c| !(c > 0.0)) {
        return Err(invalid("caps must be positive"));
    }
    let a = rp.a;
    let mut observables = vec![(Observable::PotentialPower(a), None)];
    observables.extend(caps.iter().map(|&cap| (Observable::CappedPotentialPower { a, cap }, Some(cap))));
    let mut values = direct_time_integrals(p, x, rp, cfg, &observables)?;
    let rest = values.split_off(1);
    Ok((values.pop().expect("unregularized value"), rest))
}

/// `∫_0^∞ e^{-At^β} t^γ dt = Γ((γ+1)/β) / (β A^{(γ+1)/β})`.
pub fn gamma_integral_oracle(a_coef: f64, beta: f64, gamma_exp: f64) -> Result<f64> {
    if !(a_coef > 0.0 && beta > 0.0 && gamma_exp > -1.0) {
        return Err(invalid(format!("need A > 0, beta > 0, gamma > -1; got ({a_coef}, {beta}, {gamma_exp})")));
    }
    let s = (gamma_exp + 1.0) / beta;
    Ok(gamma(s) / (beta * a_coef.powf(s)))
}

/// The same integral through the singular-weight quadrature used for the
/// functionals, with the weight `t^γ = t^{a-1}`, `a = γ + 1`, split at 1
/// and cut off where `At^β = 60`.
pub fn gamma_integral_quadrature(a_coef: f64, beta: f64, gamma_exp: f64, rel_tol: f64) -> Result<f64> {
    gamma_integral_oracle(a_coef, beta, gamma_exp)?;
    let cutoff = (60.0 / a_coef).powf(1.0 / beta).max(2.0);
    let opts = QuadOptions { rel_tol, abs_tol: 1e-300, ..QuadOptions::default() };
    let s = integrate_power_weight(|t| (-a_coef * t.powf(beta)).exp(), gamma_exp + 1.0, 1.0, cutoff, &opts)?;
    Ok(s.value())
}
