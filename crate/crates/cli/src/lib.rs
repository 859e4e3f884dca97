//! Batch runner for the semigroup and Riesz transform certificates.
//!
//! A run loads an [`ExperimentConfig`], executes the selected certificates
//! in listing order and writes `summary.json` plus one CSV per sweep.

pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

use riesz_core::verify::{
    certify_derivative_identity, certify_l1_side, certify_reflection_bound, certify_small_time_decay,
    certify_small_time_decay_near_origin, certify_xexmax, dimension_sweep, dimension_sweep_certificate,
    fit_large_time_decay, SweepReport, CERTIFICATES,
};
use riesz_core::SeparablePotential;

pub use config::ExperimentConfig;
pub use report::{CertificateEntry, Summary, SweepSummary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) => 3,
        }
    }
}

impl From<riesz_core::Error> for RunError {
    fn from(e: riesz_core::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

/// `(name, statement, default grid)` for every certificate, in run order.
pub fn certificate_table() -> Vec<(&'static str, &'static str, &'static str)> {
    let rows = vec![
        (
            "small_time_decay",
            "e^{-tL_i}1(x) <= exp(-c_N t V_i(x)) for 0 < t <= N",
            "t = N/10..N step N/10; x in {0.5,1,2,3,4,5,6}",
        ),
        (
            "small_time_decay_near_origin",
            "e^{-tL_i}1(x) <= exp(-c(t^{alpha/2+1} + t V_i(x))) for t <= N, |x| <= 4",
            "t = N/10..N step N/10; x in {0,0.5,1,2,3,4}",
        ),
        (
            "large_time_decay",
            "e^{-tL_i}1(x) <= C exp(-delta t) for t >= N; e^{-tL}1(0) <= exp(-d delta t)",
            "t in {N,2N,3N,4N}; x in {0,0.5,1,2}; d = 4",
        ),
        (
            "reflection_bound",
            "P(sup_{s<=t} |X_s - x| >= |x|/2) <= 4 exp(-|x|^2/(8t))",
            "x in {4,5,6,8}; t in {0.1,0.25,0.5,1}; 1e5 paths, dt = 1e-4",
        ),
        (
            "derivative_identity",
            "d/dt e^{-tL_i}1 = -e^{-tL_i}V_i for truncated V_i",
            "t in {0.25,0.5,1,2}; x in {0,1,2}; cap 1e6",
        ),
        ("xexmax", "max_{v>=0} v^a exp(-(N/2)cv) = (2a/(Nce))^a", "a in {0.5,1,2} x (c,N) in {(0.25,1),(1,1),(2,4)}"),
        (
            "dimension_sweep",
            "sup_x R_V^a(1)(x) bounded independently of d",
            "d in {1,2,4,8,16}; a in {0.5,1,2}; radii {0.5,1,1.5,2,3,4}",
        ),
        (
            "l1_side",
            "sup_x L^{-a}(V^a)(x) bounded independently of d; e^{-tL}(V^a) <= (e^{-tL}V)^a",
            "d in {1,2,4,8}; a in {0.5,1}; 12 Hoelder nodes",
        ),
    ];
    debug_assert!(rows.iter().map(|r| r.0).eq(CERTIFICATES.iter().copied()));
    rows
}

pub struct Outcome {
    pub summary: Summary,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    /// 0 when every non-exploratory certificate passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.all_passed {
            0
        } else {
            1
        }
    }
}

/// Runs the selected certificates (or only `only`) and writes reports into
/// `out`.
pub fn run(cfg: &ExperimentConfig, only: Option<&str>, out: &Path) -> Result<Outcome, RunError> {
    let selected: Vec<&str> = match only {
        Some(name) if !CERTIFICATES.contains(&name) => {
            return Err(RunError::Config(format!("--only: unknown certificate `{name}`")));
        }
        Some(name) => vec![name],
        None => CERTIFICATES.iter().copied().filter(|c| cfg.wants(c)).collect(),
    };
    let d_max = cfg.max_dim();
    let mut entries: Vec<CertificateEntry> = Vec::new();
    let mut sweeps: Vec<SweepReport> = Vec::new();

    for name in selected {
        match name {
            "reflection_bound" => {
                let c = certify_reflection_bound(&cfg.reflection_bound.paths, &cfg.reflection_bound.grid())?;
                entries.push(CertificateEntry::new(None, c));
            }
            "xexmax" => {
                let triples: Vec<(f64, f64, f64)> = cfg.xexmax.triples.iter().map(|t| (t[0], t[1], t[2])).collect();
                entries.push(CertificateEntry::new(None, certify_xexmax(&triples)?));
            }
            "dimension_sweep" => {
                let s = &cfg.dimension_sweep;
                let mut reports = Vec::new();
                for &alpha in &cfg.potential.alpha {
                    let p = cfg.potential(alpha, d_max)?;
                    reports.extend(dimension_sweep(&p, &s.dims, &s.a, &s.samples, &cfg.riesz, &cfg.backend)?);
                }
                entries.push(CertificateEntry::new(None, dimension_sweep_certificate(&reports)));
                sweeps.extend(reports);
            }
            _ => {
                for &alpha in &cfg.potential.alpha {
                    let p = cfg.potential(alpha, d_max)?;
                    let c = match name {
                        "small_time_decay" => certify_small_time_decay(&p, &cfg.small_time_grid(), &cfg.backend)?,
                        "small_time_decay_near_origin" => {
                            certify_small_time_decay_near_origin(&p, &cfg.near_origin_grid(), &cfg.backend)?
                        }
                        "large_time_decay" => {
                            let d = cfg.large_time_decay.d.min(p.dim());
                            fit_large_time_decay(&p, d, &cfg.large_time_grid(), &cfg.backend)?
                        }
                        "derivative_identity" => {
                            certify_derivative_identity(&p, &cfg.derivative_identity, &cfg.backend)?
                        }
                        "l1_side" => {
                            let s = &cfg.l1_side;
                            let (rep, c) = certify_l1_side(
                                &p,
                                &s.dims,
                                &s.a,
                                &s.radii,
                                &cfg.riesz,
                                &cfg.backend,
                                &s.holder_paths,
                                &s.holder_nodes,
                            )?;
                            sweeps.extend(rep.sweeps);
                            c
                        }
                        other => unreachable!("unhandled certificate {other}"),
                    };
                    entries.push(CertificateEntry::new(Some(alpha), c));
                }
            }
        }
    }

    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut sweep_summaries = Vec::new();
    for s in &sweeps {
        let file = report::csv_name(s);
        let path = out.join(&file);
        report::write_sweep_csv(&path, s)?;
        written.push(path);
        sweep_summaries.push(SweepSummary::new(file, s));
    }
    let summary = Summary::new(entries, sweep_summaries);
    let path = out.join("summary.json");
    report::write_summary(&path, &summary)?;
    written.push(path);
    Ok(Outcome { summary, written })
}
