//! Dimension sweeps of `sup_x R_V^a(1)(x)` and `sup_x L^{-a}(V^a)(x)`, and
//! the pointwise inequality `e^{-tL}(V^a) ≤ (e^{-tL}V)^a`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{BoundCertificate, CertificateNode, SIGMAS};
use crate::error::{invalid, Error, Result};
use crate::paths::PathConfig;
use crate::potentials::{Potential, SeparablePotential};
use crate::riesz::{RieszEvaluator, RieszParams, RieszValue};
use crate::semigroup::{direct_trajectories, Backend, Observable};
use crate::stats::{fit_line, mean_and_stderr, SlopeFit};

/// Sample points per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSpec {
    /// Radii of the single-coordinate points `(r, 0, …, 0)` and the
    /// diagonal points `(r/√d, …, r/√d)`.
    pub radii: Vec<f64>,
    /// Spacing of the one-dimensional search grid for the maximizer.
    pub search_step: f64,
    /// End of the one-dimensional search grid.
    pub search_max: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { radii: vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0], search_step: 0.05, search_max: 4.0 }
    }
}

/// Labelled sample points in dimension `d`: single-coordinate and diagonal
/// points for every radius, and each one-dimensional maximizer replicated in
/// every coordinate (`max1d-rep`) and in the first only (`max1d-single`).
pub fn sweep_points(d: usize, radii: &[f64], maximizers: &[f64]) -> Vec<(String, Vec<f64>)> {
    let mut out = Vec::new();
    for &r in radii {
        let mut single = vec![0.0; d];
        single[0] = r;
        out.push((format!("single-r{r}"), single));
        if d > 1 {
            out.push((format!("diag-r{r}"), vec![r / (d as f64).sqrt(); d]));
        }
    }
    for (k, &x) in maximizers.iter().enumerate() {
        let tag = if maximizers.len() > 1 { format!("{k}") } else { String::new() };
        out.push((format!("max1d-rep{tag}"), vec![x; d]));
        if d > 1 {
            let mut single = vec![0.0; d];
            single[0] = x;
            out.push((format!("max1d-single{tag}"), single));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub sample_id: String,
    pub x: Vec<f64>,
    pub value: f64,
    pub stat_err: f64,
    /// Quadrature (with tail bound) plus discretization error.
    pub quad_err: f64,
}

impl SweepRow {
    fn from_value(d: usize, sample_id: &str, x: &[f64], v: &RieszValue) -> Self {
        Self {
            d,
            sample_id: sample_id.to_string(),
            x: x.to_vec(),
            value: v.value,
            stat_err: v.statistical_error,
            quad_err: v.quadrature_error + v.discretization_error,
        }
    }

    /// `3·stat_err + quad_err`.
    pub fn combined_error(&self) -> f64 {
        SIGMAS * self.stat_err + self.quad_err
    }
}

/// Comparison of every value with a fixed level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeilingCheck {
    pub level: f64,
    /// `|value - level| ≤ error` when set, `value ≤ level + error` otherwise.
    pub two_sided: bool,
    pub passed: bool,
    /// Largest `|value - level| - error` (or `value - level - error`).
    pub worst_excess: f64,
    /// `(d, sample_id, value, error)` of the violating rows.
    pub violations: Vec<(usize, String, f64, f64)>,
}

impl CeilingCheck {
    fn evaluate(rows: &[SweepRow], level: f64, two_sided: bool) -> Self {
        let mut worst = f64::NEG_INFINITY;
        let mut violations = Vec::new();
        for r in rows {
            let dev = if two_sided { (r.value - level).abs() } else { r.value - level };
            let excess = dev - r.combined_error();
            worst = worst.max(excess);
            if excess > 0.0 {
                violations.push((r.d, r.sample_id.clone(), r.value, r.combined_error()));
            }
        }
        Self { level, two_sided, passed: violations.is_empty(), worst_excess: worst, violations }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupEntry {
    pub d: usize,
    pub sample_id: String,
    pub value: f64,
    pub error: f64,
}

/// Sweep of one functional over dimensions for one `(α, a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub functional: String,
    pub alpha: f64,
    pub a: f64,
    pub dims: Vec<usize>,
    pub maximizer_1d: Option<f64>,
    pub rows: Vec<SweepRow>,
    pub sups: Vec<SupEntry>,
    /// `max_d sup_d / sup_{d_min}`.
    pub growth: f64,
    /// Least-squares fit of `log sup_d` against `log d`.
    pub slope: SlopeFit,
    /// `slope ≤ 2·slope_se`.
    pub trend_ok: bool,
    pub ceiling: Option<CeilingCheck>,
    pub exploratory: bool,
}

impl SweepReport {
    fn assemble(functional: &str, p: &Potential, a: f64, dims: &[usize], rows: Vec<SweepRow>) -> Result<Self> {
        let mut sups = Vec::new();
        for &d in dims {
            let best = rows
                .iter()
                .filter(|r| r.d == d)
                .max_by(|x, y| x.value.total_cmp(&y.value))
                .ok_or_else(|| Error::DegenerateGrid(format!("no samples in dimension {d}")))?;
            sups.push(SupEntry {
                d,
                sample_id: best.sample_id.clone(),
                value: best.value,
                error: best.combined_error(),
            });
        }
        if sups.iter().any(|s| !(s.value > 0.0)) {
            return Err(Error::DegenerateGrid("sweep sup vanishes; log-log trend undefined".into()));
        }
        let xs: Vec<f64> = sups.iter().map(|s| (s.d as f64).ln()).collect();
        let ys: Vec<f64> = sups.iter().map(|s| s.value.ln()).collect();
        let errs: Vec<f64> = sups.iter().map(|s| s.error / s.value).collect();
        let slope = fit_line(&xs, &ys, &errs);
        let first = sups[0].value;
        let growth = sups.iter().map(|s| s.value / first).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            functional: functional.to_string(),
            alpha: p.alpha(),
            a,
            dims: dims.to_vec(),
            maximizer_1d: None,
            rows,
            sups,
            growth,
            trend_ok: slope.slope <= 2.0 * slope.slope_se,
            slope,
            ceiling: None,
            exploratory: p.is_exploratory(),
        })
    }
}

fn check_dims(p: &Potential, dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::DegenerateGrid("a trend needs at least two dimensions".into()));
    }
    if dims.windows(2).any(|w| w[1] <= w[0]) || dims[0] == 0 {
        return Err(invalid("dimensions must be positive and increasing"));
    }
    let d_max = *dims.last().expect("non-empty");
    if d_max > p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: d_max });
    }
    Ok(())
}

fn dedup_points(points: impl IntoIterator<Item = Vec<f64>>) -> Vec<Vec<f64>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for x in points {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(x);
        }
    }
    out
}

/// `sup_x R_V^a(1)(x)` over the sample points of every dimension in `dims`
/// (prefixes of `p`), for every exponent in `a_values`. The `e^{-tL_i}1`
/// tables are shared across dimensions and exponents. For `a = 1` the
/// values are also compared with the level 1.
pub fn dimension_sweep(
    p: &Potential,
    dims: &[usize],
    a_values: &[f64],
    samples: &SampleSpec,
    rp: &RieszParams,
    backend: &Backend,
) -> Result<Vec<SweepReport>> {
    check_dims(p, dims)?;
    if a_values.is_empty() {
        return Err(invalid("no Riesz exponents"));
    }
    if !(samples.search_step > 0.0 && samples.search_max >= samples.search_step) {
        return Err(invalid("search grid needs 0 < step <= max"));
    }
    // one-dimensional maximizer on the search grid, per exponent
    let n_search = (samples.search_max / samples.search_step).round() as usize;
    let search: Vec<Vec<f64>> = (1..=n_search).map(|k| vec![k as f64 * samples.search_step]).collect();
    let ev1 = RieszEvaluator::new(&p.prefix(1)?, backend, rp, &search, false)?;
    let mut maximizers = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let mut best = (f64::NEG_INFINITY, search[0][0]);
        for x in &search {
            let v = ev1.riesz_one_with_exponent(x, a)?.value;
            if v > best.0 {
                best = (v, x[0]);
            }
        }
        maximizers.push(best.1);
    }

    let per_a: Vec<Vec<(usize, Vec<(String, Vec<f64>)>)>> = maximizers
        .iter()
        .map(|&xs| dims.iter().map(|&d| (d, sweep_points(d, &samples.radii, &[xs]))).collect())
        .collect();
    let points = dedup_points(per_a.iter().flatten().flat_map(|(_, pts)| pts.iter().map(|(_, x)| x.clone())));
    let ev = RieszEvaluator::new(p, backend, rp, &points, false)?;

    let mut reports = Vec::with_capacity(a_values.len());
    for ((&a, &x_star), layout) in a_values.iter().zip(&maximizers).zip(&per_a) {
        let mut rows = Vec::new();
        for (d, pts) in layout {
            for (id, x) in pts {
                rows.push(SweepRow::from_value(*d, id, x, &ev.riesz_one_with_exponent(x, a)?));
            }
        }
        let mut report = SweepReport::assemble("riesz_one", p, a, dims, rows)?;
        report.maximizer_1d = Some(x_star);
        if a == 1.0 {
            report.ceiling = Some(CeilingCheck::evaluate(&report.rows, 1.0, false));
        }
        reports.push(report);
    }
    Ok(reports)
}

fn trend_node(report: &SweepReport) -> CertificateNode {
    // absolute margin against a zero slope
    let s = &report.slope;
    let sups: Vec<String> = report.sups.iter().map(|e| format!("d={}: {}", e.d, e.value)).collect();
    CertificateNode {
        t: None,
        x: Vec::new(),
        d: None,
        a: Some(report.a),
        estimate: s.slope,
        error: 2.0 * s.slope_se,
        bound: 0.0,
        margin: 2.0 * s.slope_se - s.slope,
        note: Some(format!("{} alpha={} sups [{}]", report.functional, report.alpha, sups.join(", "))),
    }
}

fn label(report: &SweepReport) -> String {
    format!("alpha={},a={}", report.alpha, report.a)
}

/// Certificate for a set of Riesz sweeps: passes when no sweep shows a
/// positive log-log trend beyond two standard errors. Exploratory sweeps are
/// reported but do not count. The `a = 1` level-1 comparison is recorded as
/// a flag.
pub fn dimension_sweep_certificate(reports: &[SweepReport]) -> BoundCertificate {
    let mut cert = BoundCertificate::new("dimension_sweep");
    let mut worst = f64::INFINITY;
    let mut counted = 0;
    for r in reports {
        let node = trend_node(r);
        cert.constant(&format!("growth[{}]", label(r)), r.growth);
        cert.constant(&format!("slope[{}]", label(r)), r.slope.slope);
        if r.exploratory {
            cert.flag(format!("exploratory sweep {} not counted", label(r)));
        } else {
            worst = worst.min(node.margin);
            counted += 1;
        }
        if let Some(c) = &r.ceiling {
            if !c.passed {
                let ds: BTreeSet<usize> = c.violations.iter().map(|v| v.0).collect();
                let ds: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                cert.flag(format!("{}: values above 1 + error at d = {}", label(r), ds.join(", ")));
            }
        }
        cert.nodes.push(node);
    }
    if counted == 0 {
        cert.exploratory = !reports.is_empty();
        cert.conclude_from_nodes();
    } else {
        cert.conclude(worst);
    }
    cert
}

/// One comparison of `e^{-tL}(V^a)(x)` with `(e^{-tL}V(x))^a` from a shared
/// full-dimensional ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderNode {
    pub t: f64,
    pub d: usize,
    pub x: Vec<f64>,
    pub a: f64,
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    /// `(rhs + 3·√(lhs_se² + rhs_se²) - lhs)/rhs`.
    pub margin: f64,
}

/// Checks `e^{-tL}(V^a)(x) ≤ (e^{-tL}V(x))^a` at each `(t, d, coordinate
/// value)`, with `x = (v, …, v)` in dimension `d`.
pub fn holder_check(p: &Potential, cfg: &PathConfig, a: f64, nodes: &[(f64, usize, f64)]) -> Result<Vec<HolderNode>> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(invalid(format!("Hölder check needs 0 < a <= 1, got {a}")));
    }
    nodes
        .iter()
        .map(|&(t, d, v)| {
            if !(t > 0.0) {
                return Err(invalid(format!("Hölder node needs t > 0, got {t}")));
            }
            let pd = p.prefix(d)?;
            let x = vec![v; d];
            let obs = [Observable::PotentialPower(a), Observable::PotentialPower(1.0)];
            let trs = direct_trajectories(&pd, &x, &[0.0, t], cfg, &obs)?;
            let stat = |k: usize| {
                let batches: Vec<f64> = (1..trs[k].n_replicas()).map(|r| trs[k].node_values(r, 0)[1]).collect();
                (trs[k].node_values(0, 0)[1], mean_and_stderr(&batches).1)
            };
            let (lhs, lhs_se) = stat(0);
            let (v1, v1_se) = stat(1);
            let rhs = v1.powf(a);
            let rhs_se = if v1 > 0.0 { a * v1.powf(a - 1.0) * v1_se } else { 0.0 };
            let slack = SIGMAS * (lhs_se * lhs_se + rhs_se * rhs_se).sqrt();
            let margin = if rhs > 0.0 {
                (rhs + slack - lhs) / rhs
            } else if lhs <= slack {
                0.0
            } else {
                -1.0
            };
            Ok(HolderNode { t, d, x, a, lhs, lhs_se, rhs, rhs_se, margin })
        })
        .collect()
}

/// Adjoint sweeps and Hölder checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Report {
    pub sweeps: Vec<SweepReport>,
    pub holder: Vec<HolderNode>,
}

/// Sweeps `sup_x L^{-a}(V^a)(x)` (Hölder form) over `dims` for each `a ≤ 1`
/// with the slope test, checks that the `a = 1` values equal 1 within
/// their errors, and checks the Hölder inequality at `holder_nodes` for
/// every `a < 1`.
#[allow(clippy::too_many_arguments)]
pub fn certify_l1_side(
    p: &Potential,
    dims: &[usize],
    a_values: &[f64],
    radii: &[f64],
    rp: &RieszParams,
    backend: &Backend,
    holder_cfg: &PathConfig,
    holder_nodes: &[(f64, usize, f64)],
) -> Result<(L1Report, BoundCertificate)> {
    check_dims(p, dims)?;
    if a_values.is_empty() {
        return Err(invalid("no exponents"));
    }
    if let Some(a) = a_values.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
        return Err(invalid(format!("the adjoint functional needs 0 < a <= 1, got {a}")));
    }
    let mut cert = BoundCertificate::new("l1_side");
    cert.exploratory = p.is_exploratory();
    if p.is_degenerate() {
        cert.vacuous("degenerate potential: functional vanishes");
        return Ok((L1Report { sweeps: Vec::new(), holder: Vec::new() }, cert));
    }
    let mut radii_with_origin = vec![0.0];
    radii_with_origin.extend(radii.iter().filter(|&&r| r != 0.0));
    let layout: Vec<(usize, Vec<(String, Vec<f64>)>)> = dims
        .iter()
        .map(|&d| {
            let mut pts = sweep_points(d, &radii_with_origin, &[]);
            pts.retain(|(id, _)| id != "diag-r0");
            (d, pts)
        })
        .collect();
    let points = dedup_points(layout.iter().flat_map(|(_, pts)| pts.iter().map(|(_, x)| x.clone())));

    let mut sweeps = Vec::new();
    let mut worst = f64::INFINITY;
    for &a in a_values {
        let ev = RieszEvaluator::new(p, backend, &RieszParams { a, ..*rp }, &points, true)?;
        let mut rows = Vec::new();
        for (d, pts) in &layout {
            for (id, x) in pts {
                rows.push(SweepRow::from_value(*d, id, x, &ev.adjoint(x)?.holder));
            }
        }
        let mut report = SweepReport::assemble("adjoint", p, a, dims, rows)?;
        if a == 1.0 {
            let unity = CeilingCheck::evaluate(&report.rows, 1.0, true);
            // absolute margin: largest |value - 1| beyond its error
            let node = CertificateNode {
                t: None,
                x: Vec::new(),
                d: None,
                a: Some(a),
                estimate: unity.worst_excess,
                error: 0.0,
                bound: 0.0,
                margin: -unity.worst_excess,
                note: Some("a = 1 values equal 1 within their errors".into()),
            };
            worst = worst.min(node.margin);
            cert.nodes.push(node);
            report.ceiling = Some(unity);
        }
        let node = trend_node(&report);
        worst = worst.min(node.margin);
        cert.nodes.push(node);
        cert.constant(&format!("growth[{}]", label(&report)), report.growth);
        sweeps.push(report);
    }

    let mut holder = Vec::new();
    for &a in a_values.iter().filter(|&&a| a < 1.0) {
        holder.extend(holder_check(p, holder_cfg, a, holder_nodes)?);
    }
    for h in &holder {
        worst = worst.min(h.margin);
        cert.nodes.push(CertificateNode {
            t: Some(h.t),
            x: h.x.clone(),
            d: Some(h.d),
            a: Some(h.a),
            estimate: h.lhs,
            error: -SIGMAS * (h.lhs_se * h.lhs_se + h.rhs_se * h.rhs_se).sqrt(),
            bound: h.rhs,
            margin: h.margin,
            note: Some("Hölder inequality".into()),
        });
    }
    cert.conclude(worst);
    Ok((L1Report { sweeps, holder }, cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_layout() {
        let pts = sweep_points(4, &[1.0, 2.0], &[1.5]);
        let ids: Vec<&str> = pts.iter().map(|p| p.0.as_str()).collect();
        assert_eq!(ids, ["single-r1", "diag-r1", "single-r2", "diag-r2", "max1d-rep", "max1d-single"]);
        assert_eq!(pts[1].1, vec![0.5; 4]);
        let one = sweep_points(1, &[1.0], &[0.7]);
        assert_eq!(one.len(), 2);
    }

    #[test]
    fn ceiling_logic() {
        let row = |v: f64| SweepRow { d: 1, sample_id: "s".into(), x: vec![], value: v, stat_err: 0.0, quad_err: 0.01 };
        let c = CeilingCheck::evaluate(&[row(0.5), row(1.005)], 1.0, false);
        assert!(c.passed);
        let c = CeilingCheck::evaluate(&[row(0.5), row(1.02)], 1.0, false);
        assert!(!c.passed && c.violations.len() == 1);
        let c = CeilingCheck::evaluate(&[row(0.5)], 1.0, true);
        assert!(!c.passed);
    }

    #[test]
    fn dims_validated() {
        let p = Potential::constant(2.0, 4, 1.0).unwrap();
        let rp = RieszParams::default();
        let b = Backend::grid();
        assert!(dimension_sweep(&p, &[1], &[0.5], &SampleSpec::default(), &rp, &b).is_err());
        assert!(dimension_sweep(&p, &[1, 8], &[0.5], &SampleSpec::default(), &rp, &b).is_err());
        assert!(dimension_sweep(&p, &[2, 1], &[0.5], &SampleSpec::default(), &rp, &b).is_err());
    }

    #[test]
    fn holder_requires_small_exponent() {
        let p = Potential::constant(2.0, 2, 1.0).unwrap();
        assert!(holder_check(&p, &PathConfig::default(), 1.5, &[(0.5, 2, 1.0)]).is_err());
    }
}
