//! Decay of `e^{-tL_i}1`: small-time bounds `e^{-c tV_i(x)}` and
//! `e^{-c(t^{α/2+1} + tV_i(x))}`, and large-time exponential decay.

use serde::{Deserialize, Serialize};

use super::{BoundCertificate, CertificateNode, SIGMAS};
use crate::error::{invalid, Error, Result};
use crate::potentials::{Potential, SeparablePotential};
use crate::semigroup::{coordinate_trajectory, time_mesh, Backend, Datum, Trajectory};

/// `(t, x)` sample grid and the split point `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayGrid {
    pub split_n: f64,
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
}

impl DecayGrid {
    /// Small-time grid: `t = N/10, 2N/10, …, N` and `x ∈ {0.5, 1, 2, 3, 4, 5, 6}`.
    pub fn small_time(split_n: f64) -> Self {
        Self {
            split_n,
            times: (1..=10).map(|k| k as f64 * split_n / 10.0).collect(),
            xs: vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        }
    }

    /// Near-origin grid: the small-time times and `x ∈ {0, 0.5, 1, 2, 3, 4}`.
    pub fn near_origin(split_n: f64) -> Self {
        Self { xs: vec![0.0, 0.5, 1.0, 2.0, 3.0, 4.0], ..Self::small_time(split_n) }
    }

    /// Large-time grid: `t ∈ {N, 2N, 3N, 4N}` and `x ∈ {0, 0.5, 1, 2}`.
    pub fn large_time(split_n: f64) -> Self {
        Self { split_n, times: (1..=4).map(|k| k as f64 * split_n).collect(), xs: vec![0.0, 0.5, 1.0, 2.0] }
    }

    fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        if !(self.split_n > 0.0) {
            return Err(invalid("split point must be positive"));
        }
        if self.times.is_empty() || self.xs.is_empty() {
            return Err(Error::DegenerateGrid("empty time or space grid".into()));
        }
        let tol = 1e-12 * self.split_n;
        if let Some(t) = self.times.iter().find(|&&t| !(t > 0.0 && t >= lo - tol && t <= hi + tol)) {
            return Err(invalid(format!("grid time {t} outside [{lo}, {hi}]")));
        }
        Ok(())
    }

    fn sorted_times(&self) -> Vec<f64> {
        let mut ts = self.times.clone();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

/// One table per distinct coefficient among `coords`, at the `|x|` of the grid.
struct Tables {
    abs_xs: Vec<f64>,
    /// `(coordinate, table)`
    tables: Vec<(usize, Trajectory)>,
}

impl Tables {
    fn build(p: &Potential, coords: &[usize], xs: &[f64], t_max: f64, backend: &Backend) -> Result<Self> {
        let mut abs_xs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        abs_xs.sort_by(f64::total_cmp);
        abs_xs.dedup();
        let base = match backend {
            Backend::Grid(o) => o.dt_max,
            Backend::MonteCarlo(c) => c.dt,
        };
        let mesh = time_mesh(t_max, base);
        let mut tables: Vec<(usize, Trajectory)> = Vec::new();
        for &i in coords {
            let kappa = p.coefficients()[i];
            if tables.iter().any(|(j, _)| p.coefficients()[*j] == kappa) {
                continue;
            }
            tables.push((i, coordinate_trajectory(p, i, Datum::One, &abs_xs, &mesh, backend)?));
        }
        Ok(Self { abs_xs, tables })
    }

    /// `(estimate, one-sided error)` of `e^{-tL_i}1(x)` for the table
    /// representing coordinate `i`.
    fn value(&self, p: &Potential, i: usize, x: f64, t: f64) -> (f64, f64) {
        let kappa = p.coefficients()[i];
        let (_, tr) = self.tables.iter().find(|(j, _)| p.coefficients()[*j] == kappa).expect("tabulated");
        let k = self.abs_xs.iter().position(|&y| y == x.abs()).expect("tabulated x");
        let (se, disc) = tr.errors(k, t);
        (tr.value(0, k, t), SIGMAS * se + disc)
    }
}

/// Upper one-sided value, clamped to `(0, 1]`.
fn one_sided(u: f64, err: f64) -> f64 {
    (u + err).clamp(f64::MIN_POSITIVE, 1.0)
}

fn all_coords(p: &Potential) -> Vec<usize> {
    (0..p.dim()).collect()
}

fn small_time_fit(
    name: &str,
    p: &Potential,
    grid: &DecayGrid,
    backend: &Backend,
    with_time_term: bool,
) -> Result<BoundCertificate> {
    grid.validate(0.0, grid.split_n)?;
    let mut cert = BoundCertificate::new(name);
    cert.exploratory = p.is_exploratory();
    cert.constant("N", grid.split_n);
    if p.is_degenerate() {
        cert.vacuous("degenerate potential: c_N unconstrained");
        return Ok(cert);
    }
    let times = grid.sorted_times();
    let t_max = *times.last().expect("non-empty");
    let coords = all_coords(p);
    let tables = Tables::build(p, &coords, &grid.xs, t_max, backend)?;
    let alpha = p.alpha();
    let exponent = |t: f64, v: f64| if with_time_term { t.powf(alpha / 2.0 + 1.0) + t * v } else { t * v };

    let mut samples = Vec::new();
    for &(i, _) in &tables.tables {
        for &x in &tables.abs_xs {
            let v = p.coordinate_value(i, x);
            for &t in &times {
                let e = exponent(t, v);
                if e > 0.0 {
                    let (u, err) = tables.value(p, i, x, t);
                    samples.push((i, x, t, e, u, err));
                }
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::DegenerateGrid(format!("{name}: every node has a vanishing exponent")));
    }
    let c = samples.iter().map(|&(_, _, _, e, u, err)| -one_sided(u, err).ln() / e).fold(f64::INFINITY, f64::min);
    for &(i, x, t, e, u, err) in &samples {
        let mut node = CertificateNode::upper(Some(t), vec![x], u, err, (-c * e).exp());
        if p.dim() > 1 {
            node = node.with_note(format!("coordinate {i}"));
        }
        cert.nodes.push(node);
    }
    cert.constant("c_N", c);
    cert.conclude_positive(c);
    Ok(cert)
}

/// Fits `c_N = min -log(u + 3σ + disc)/(tV_i(x))` over the grid nodes with
/// `tV_i(x) > 0`, for `u = e^{-tL_i}1(x)`, and certifies `c_N > 0`.
pub fn certify_small_time_decay(p: &Potential, grid: &DecayGrid, backend: &Backend) -> Result<BoundCertificate> {
    small_time_fit("small_time_decay", p, grid, backend, false)
}

/// As [`certify_small_time_decay`] with the exponent `t^{α/2+1} + tV_i(x)`,
/// on `|x| ≤ 4`.
pub fn certify_small_time_decay_near_origin(
    p: &Potential,
    grid: &DecayGrid,
    backend: &Backend,
) -> Result<BoundCertificate> {
    if let Some(x) = grid.xs.iter().find(|x| x.abs() > 4.0) {
        return Err(invalid(format!("near-origin grid must satisfy |x| <= 4, got {x}")));
    }
    small_time_fit("small_time_decay_near_origin", p, grid, backend, true)
}

/// A constant `c` valid on `[0, t0]` gives `c·t0/N` on `[t0, N]`, because
/// `e^{-tL}1` is non-increasing in `t`.
pub fn extend_decay_constant(c: f64, t0: f64, split_n: f64) -> f64 {
    c * t0 / split_n
}

/// Fits the per-coordinate rate `δ_fit = min -log(u + 3σ + disc)/t` over
/// `t ∈ [N, 4N]` and the grid `x`, with `C_fit = 1`, and compares the
/// `d`-dimensional value at the origin with `e^{-dδ_fit t}`. Certifies
/// `δ_fit > 0`.
pub fn fit_large_time_decay(p: &Potential, d: usize, grid: &DecayGrid, backend: &Backend) -> Result<BoundCertificate> {
    grid.validate(grid.split_n, 4.0 * grid.split_n)?;
    if d == 0 || d > p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: d });
    }
    let mut cert = BoundCertificate::new("large_time_decay");
    cert.exploratory = p.is_exploratory();
    cert.constant("N", grid.split_n);
    cert.constant("d", d as f64);
    let mut xs = grid.xs.clone();
    if !xs.contains(&0.0) {
        xs.push(0.0);
    }
    let times = grid.sorted_times();
    let t_max = *times.last().expect("non-empty");
    let coords: Vec<usize> = (0..d).collect();
    let tables = Tables::build(p, &coords, &xs, t_max, backend)?;

    let mut delta = f64::INFINITY;
    for &(i, _) in &tables.tables {
        for &x in &tables.abs_xs {
            for &t in &times {
                let (u, err) = tables.value(p, i, x, t);
                let rate = -one_sided(u, err).ln() / t;
                delta = delta.min(rate);
                let mut node = CertificateNode::upper(Some(t), vec![x], u, err, (-rate.max(0.0) * t).exp());
                if p.dim() > 1 {
                    node = node.with_note(format!("coordinate {i}"));
                }
                cert.nodes.push(node.with_d(1));
            }
        }
    }
    // d-dimensional value at the origin against e^{-dδt}
    for &t in &times {
        let mut u = 1.0;
        let mut upper = 1.0;
        for i in 0..d {
            let (ui, err) = tables.value(p, i, 0.0, t);
            u *= ui;
            upper *= one_sided(ui, err);
        }
        let bound = (-(d as f64) * delta.max(0.0) * t).exp();
        cert.nodes.push(CertificateNode::upper(Some(t), vec![0.0; d], u, upper - u, bound).with_d(d));
    }
    // node margins are non-negative by construction of δ_fit
    if p.is_degenerate() {
        // only the absorbing boundary of the grid could make u < 1
        delta = 0.0;
    }
    cert.constant("delta_fit", delta);
    cert.constant("C_fit", 1.0);
    cert.constant("d_delta", d as f64 * delta);
    if p.is_degenerate() {
        cert.flag("degenerate potential: no decay");
    }
    cert.conclude_positive(delta);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_potential_is_vacuous_for_small_time() {
        let z = Potential::zero(1);
        let c = certify_small_time_decay(&z, &DecayGrid::small_time(1.0), &Backend::grid()).unwrap();
        assert_eq!(c.status, super::super::CertificateStatus::Vacuous);
        assert!(c.passed && c.flags.iter().any(|f| f.contains("degenerate")));
        assert!(!c.fitted_constants.contains_key("c_N"));
    }

    #[test]
    fn degenerate_potential_fails_large_time() {
        let z = Potential::zero(1);
        let c = fit_large_time_decay(&z, 1, &DecayGrid::large_time(1.0), &Backend::grid()).unwrap();
        assert!(!c.passed);
        assert!(c.flags.iter().any(|f| f.contains("degenerate")));
    }

    #[test]
    fn grid_checks() {
        let p = Potential::constant(2.0, 1, 1.0).unwrap();
        let bad = DecayGrid { times: vec![2.0], ..DecayGrid::small_time(1.0) };
        assert!(certify_small_time_decay(&p, &bad, &Backend::grid()).is_err());
        let far = DecayGrid { xs: vec![5.0], ..DecayGrid::near_origin(1.0) };
        assert!(certify_small_time_decay_near_origin(&p, &far, &Backend::grid()).is_err());
        let origin_only = DecayGrid { xs: vec![0.0], ..DecayGrid::small_time(1.0) };
        assert!(matches!(certify_small_time_decay(&p, &origin_only, &Backend::grid()), Err(Error::DegenerateGrid(_))));
        assert!(fit_large_time_decay(&p, 2, &DecayGrid::large_time(1.0), &Backend::grid()).is_err());
    }

    #[test]
    fn extension_arithmetic() {
        assert!((extend_decay_constant(0.6, 0.25, 1.0) - 0.15).abs() < 1e-15);
    }
}
