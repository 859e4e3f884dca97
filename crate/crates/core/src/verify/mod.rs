//! One-sided numerical certificates for the semigroup and Riesz bounds.
//!
//! Every comparison moves the estimate towards the bound by its error
//! (3 standard errors plus discretization error) before it is checked, so
//! noise cannot produce a pass.

mod decay;
mod identities;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use decay::{
    certify_small_time_decay, certify_small_time_decay_near_origin, extend_decay_constant, fit_large_time_decay,
    DecayGrid,
};
pub use identities::{
    certify_derivative_identity, certify_reflection_bound, certify_xexmax, xexmax_bound, DerivativeGrid, ReflectionGrid,
};
pub use sweep::{
    certify_l1_side, dimension_sweep, dimension_sweep_certificate, holder_check, sweep_points, CeilingCheck,
    HolderNode, L1Report, SampleSpec, SupEntry, SweepReport, SweepRow,
};

/// Number of standard errors subtracted in every one-sided comparison.
pub const SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Passed,
    Failed,
    /// Nothing was tested: a degenerate potential or bounds that are
    /// trivially satisfied at every node.
    Vacuous,
}

/// One comparison `estimate + error ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateNode {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub estimate: f64,
    pub error: f64,
    pub bound: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CertificateNode {
    /// Relative margin `(bound - estimate - error)/bound`.
    pub fn upper(t: Option<f64>, x: Vec<f64>, estimate: f64, error: f64, bound: f64) -> Self {
        let margin = (bound - estimate - error) / bound;
        Self { t, x, d: None, a: None, estimate, error, bound, margin, note: None }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub name: String,
    pub fitted_constants: BTreeMap<String, f64>,
    pub nodes: Vec<CertificateNode>,
    pub worst_margin: f64,
    pub passed: bool,
    pub status: CertificateStatus,
    pub flags: Vec<String>,
    pub exploratory: bool,
}

impl BoundCertificate {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            fitted_constants: BTreeMap::new(),
            nodes: Vec::new(),
            worst_margin: f64::INFINITY,
            passed: true,
            status: CertificateStatus::Passed,
            flags: Vec::new(),
            exploratory: false,
        }
    }

    fn constant(&mut self, name: &str, value: f64) {
        self.fitted_constants.insert(name.to_string(), value);
    }

    fn flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }

    /// Sets the worst margin and derives `passed` and `status` from it.
    fn conclude(&mut self, worst_margin: f64) {
        self.worst_margin = worst_margin;
        self.passed = worst_margin >= 0.0;
        self.status = if self.passed { CertificateStatus::Passed } else { CertificateStatus::Failed };
    }

    /// Takes the worst node margin as the certificate margin.
    fn conclude_from_nodes(&mut self) {
        let worst = self.nodes.iter().map(|n| n.margin).fold(f64::INFINITY, f64::min);
        self.conclude(worst);
    }

    /// A fitted constant `c` certifies its bound when `c > 0`; the margin is
    /// `c`, nudged below zero when `c = 0` so that `passed ⇔ margin ≥ 0`.
    fn conclude_positive(&mut self, c: f64) {
        self.conclude(if c > 0.0 { c } else { c.min(0.0) - f64::MIN_POSITIVE });
    }

    fn vacuous(&mut self, flag: &str) {
        self.flag(flag);
        self.worst_margin = f64::INFINITY;
        self.passed = true;
        self.status = CertificateStatus::Vacuous;
    }
}

/// Names of the certificates in listing order.
pub const CERTIFICATES: [&str; 8] = [
    "small_time_decay",
    "small_time_decay_near_origin",
    "large_time_decay",
    "reflection_bound",
    "derivative_identity",
    "xexmax",
    "dimension_sweep",
    "l1_side",
];
