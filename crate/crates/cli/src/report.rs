//! JSON summary and per-sweep CSV output.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use riesz_core::stats::SlopeFit;
use riesz_core::verify::{BoundCertificate, CeilingCheck, CertificateStatus, SupEntry, SweepReport};

use crate::RunError;

#[derive(Debug, Clone, Serialize)]
pub struct CertificateEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(flatten)]
    pub certificate: BoundCertificate,
}

impl CertificateEntry {
    pub fn new(alpha: Option<f64>, certificate: BoundCertificate) -> Self {
        Self { alpha, certificate }
    }

    /// Counts against the exit status: not exploratory and not passed.
    pub fn is_failure(&self) -> bool {
        !self.certificate.exploratory && !self.certificate.passed
    }
}

/// Sweep headline; the rows live in the CSV named by `csv`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub csv: String,
    pub functional: String,
    pub alpha: f64,
    pub a: f64,
    pub dims: Vec<usize>,
    pub maximizer_1d: Option<f64>,
    pub sups: Vec<SupEntry>,
    pub growth: f64,
    pub slope: SlopeFit,
    pub trend_ok: bool,
    pub ceiling: Option<CeilingCheck>,
    pub exploratory: bool,
}

impl SweepSummary {
    pub fn new(csv: String, r: &SweepReport) -> Self {
        Self {
            csv,
            functional: r.functional.clone(),
            alpha: r.alpha,
            a: r.a,
            dims: r.dims.clone(),
            maximizer_1d: r.maximizer_1d,
            sups: r.sups.clone(),
            growth: r.growth,
            slope: r.slope,
            trend_ok: r.trend_ok,
            ceiling: r.ceiling.clone(),
            exploratory: r.exploratory,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub all_passed: bool,
    pub certificates: Vec<CertificateEntry>,
    pub sweeps: Vec<SweepSummary>,
}

impl Summary {
    pub fn new(certificates: Vec<CertificateEntry>, sweeps: Vec<SweepSummary>) -> Self {
        let all_passed = !certificates.iter().any(CertificateEntry::is_failure);
        Self { all_passed, certificates, sweeps }
    }

    pub fn find(&self, name: &str, alpha: Option<f64>) -> Option<&BoundCertificate> {
        self.certificates
            .iter()
            .find(|e| e.certificate.name == name && (alpha.is_none() || e.alpha == alpha))
            .map(|e| &e.certificate)
    }

    /// One line per certificate and sweep.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for e in &self.certificates {
            let c = &e.certificate;
            let status = match c.status {
                CertificateStatus::Passed => "PASS",
                CertificateStatus::Failed => "FAIL",
                CertificateStatus::Vacuous => "VACUOUS",
            };
            let alpha = e.alpha.map(|a| format!(" alpha={a}")).unwrap_or_default();
            let tag = if c.exploratory { " (exploratory)" } else { "" };
            let consts: Vec<String> = c.fitted_constants.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
            let _ = writeln!(
                s,
                "{status:<8}{}{alpha}{tag} worst_margin={:.4e} nodes={} {}",
                c.name,
                c.worst_margin,
                c.nodes.len(),
                consts.join(" ")
            );
            for f in &c.flags {
                let _ = writeln!(s, "        flag: {f}");
            }
        }
        for w in &self.sweeps {
            let sups: Vec<String> = w.sups.iter().map(|e| format!("{}:{:.5}", e.d, e.value)).collect();
            let _ = writeln!(
                s,
                "sweep   {} alpha={} a={} slope={:.4}±{:.4} trend_ok={} sups [{}] -> {}",
                w.functional,
                w.alpha,
                w.a,
                w.slope.slope,
                w.slope.slope_se,
                w.trend_ok,
                sups.join(" "),
                w.csv
            );
        }
        let _ = writeln!(s, "overall: {}", if self.all_passed { "PASS" } else { "FAIL" });
        s
    }
}

pub fn csv_name(r: &SweepReport) -> String {
    format!("sweep_{}_alpha{}_a{}.csv", r.functional, r.alpha, r.a)
}

pub fn write_sweep_csv(path: &Path, r: &SweepReport) -> Result<(), RunError> {
    let io = |e: csv::Error| RunError::Runtime(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["d", "sample_id", "value", "stat_err", "quad_err"]).map_err(io)?;
    for row in &r.rows {
        w.serialize((row.d, &row.sample_id, row.value, row.stat_err, row.quad_err)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<(), RunError> {
    let mut text =
        serde_json::to_string_pretty(summary).map_err(|e| RunError::Runtime(format!("serializing summary: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
