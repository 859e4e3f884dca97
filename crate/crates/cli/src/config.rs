//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use riesz_core::verify::{DecayGrid, DerivativeGrid, ReflectionGrid, SampleSpec, CERTIFICATES};
use riesz_core::{Backend, CoefficientRule, PathConfig, Potential, RieszParams};

use crate::RunError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    #[serde(default)]
    pub riesz: RieszParams,
    /// Certificates to run, in any order; defaults to all of them.
    #[serde(default = "all_certificates")]
    pub certificates: Vec<String>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub small_time_decay: DecaySpec,
    #[serde(default)]
    pub small_time_decay_near_origin: DecaySpec,
    #[serde(default)]
    pub large_time_decay: LargeTimeSpec,
    #[serde(default)]
    pub reflection_bound: ReflectionSpec,
    #[serde(default)]
    pub derivative_identity: DerivativeGrid,
    #[serde(default)]
    pub xexmax: XexmaxSpec,
    #[serde(default)]
    pub dimension_sweep: SweepSpec,
    #[serde(default)]
    pub l1_side: L1Spec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    /// One run of every α-dependent certificate per entry.
    pub alpha: Vec<f64>,
    pub m: f64,
    #[serde(rename = "M")]
    pub m_upper: f64,
    pub coefficients: CoefficientRule,
}

/// Overrides of a decay grid; missing fields keep the built-in grid.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySpec {
    pub times: Option<Vec<f64>>,
    pub xs: Option<Vec<f64>>,
}

impl DecaySpec {
    fn apply(&self, mut grid: DecayGrid) -> DecayGrid {
        if let Some(t) = &self.times {
            grid.times = t.clone();
        }
        if let Some(x) = &self.xs {
            grid.xs = x.clone();
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LargeTimeSpec {
    /// Dimension of the origin check `e^{-tL}1(0)`.
    pub d: usize,
    pub times: Option<Vec<f64>>,
    pub xs: Option<Vec<f64>>,
}

impl Default for LargeTimeSpec {
    fn default() -> Self {
        Self { d: 4, times: None, xs: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReflectionSpec {
    pub paths: PathConfig,
    pub xs: Vec<f64>,
    pub times: Vec<f64>,
}

impl ReflectionSpec {
    pub fn grid(&self) -> ReflectionGrid {
        ReflectionGrid { xs: self.xs.clone(), times: self.times.clone() }
    }
}

impl Default for ReflectionSpec {
    fn default() -> Self {
        Self {
            paths: PathConfig { n_paths: 100_000, dt: 1e-4, horizon: 1.0, seed: 11, antithetic: false },
            xs: ReflectionGrid::default().xs,
            times: ReflectionGrid::default().times,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct XexmaxSpec {
    /// `(a, c, N)` triples.
    pub triples: Vec<[f64; 3]>,
}

impl Default for XexmaxSpec {
    fn default() -> Self {
        let mut triples = Vec::new();
        for a in [0.5, 1.0, 2.0] {
            for (c, n) in [(0.25, 1.0), (1.0, 1.0), (2.0, 4.0)] {
                triples.push([a, c, n]);
            }
        }
        Self { triples }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub dims: Vec<usize>,
    pub a: Vec<f64>,
    pub samples: SampleSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { dims: vec![1, 2, 4, 8, 16], a: vec![0.5, 1.0, 2.0], samples: SampleSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct L1Spec {
    pub dims: Vec<usize>,
    pub a: Vec<f64>,
    pub radii: Vec<f64>,
    pub holder_paths: PathConfig,
    /// `(t, d, v)`: the Hölder check runs at `x = (v, …, v)` in dimension `d`.
    pub holder_nodes: Vec<(f64, usize, f64)>,
}

impl Default for L1Spec {
    fn default() -> Self {
        let mut holder_nodes = Vec::new();
        for t in [0.25, 1.0, 4.0] {
            for (d, v) in [(1, 0.5), (2, 1.0), (4, 0.0), (8, 1.5)] {
                holder_nodes.push((t, d, v));
            }
        }
        Self {
            dims: vec![1, 2, 4, 8],
            a: vec![0.5, 1.0],
            radii: vec![0.5, 1.0, 2.0, 3.0],
            holder_paths: PathConfig { n_paths: 40_000, dt: 2e-3, horizon: 4.0, seed: 23, antithetic: false },
            holder_nodes,
        }
    }
}

fn default_backend() -> Backend {
    Backend::Grid(Default::default())
}

fn all_certificates() -> Vec<String> {
    CERTIFICATES.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: Self = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            RunError::Config(msg) => RunError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |field: &str, msg: String| Err(RunError::Config(format!("field `{field}`: {msg}")));
        for name in &self.certificates {
            if !CERTIFICATES.contains(&name.as_str()) {
                return bad("certificates", format!("unknown certificate `{name}`"));
            }
        }
        if self.potential.alpha.is_empty() {
            return bad("potential.alpha", "empty list".into());
        }
        for &alpha in &self.potential.alpha {
            if let Err(e) = self.potential(alpha, 1) {
                return bad("potential", e.to_string());
            }
        }
        if let Err(e) = self.riesz.validate() {
            return bad("riesz", e.to_string());
        }
        match &self.backend {
            Backend::MonteCarlo(cfg) => {
                if let Err(e) = cfg.validate() {
                    return bad("backend", e.to_string());
                }
            }
            Backend::Grid(o) => {
                if !(o.n_cells >= 16 && o.dt_max > 0.0 && o.min_x_max > 0.0) {
                    return bad("backend", "grid needs n_cells >= 16, dt_max > 0, min_x_max > 0".into());
                }
            }
        }
        if self.wants("reflection_bound") {
            if let Err(e) = self.reflection_bound.paths.validate() {
                return bad("reflection_bound.paths", e.to_string());
            }
        }
        if self.wants("l1_side") {
            if let Err(e) = self.l1_side.holder_paths.validate() {
                return bad("l1_side.holder_paths", e.to_string());
            }
        }
        Ok(())
    }

    pub fn wants(&self, name: &str) -> bool {
        self.certificates.iter().any(|c| c == name)
    }

    /// Largest dimension any selected certificate touches.
    pub fn max_dim(&self) -> usize {
        let mut d = 1;
        if self.wants("large_time_decay") {
            d = d.max(self.large_time_decay.d);
        }
        if self.wants("dimension_sweep") {
            d = d.max(self.dimension_sweep.dims.iter().copied().max().unwrap_or(1));
        }
        if self.wants("l1_side") {
            d = d.max(self.l1_side.dims.iter().copied().max().unwrap_or(1));
            d = d.max(self.l1_side.holder_nodes.iter().map(|n| n.1).max().unwrap_or(1));
        }
        d
    }

    pub fn potential(&self, alpha: f64, d: usize) -> riesz_core::Result<Potential> {
        let s = &self.potential;
        Potential::from_rule(alpha, d, s.m, s.m_upper, &s.coefficients)
    }

    pub fn small_time_grid(&self) -> DecayGrid {
        self.small_time_decay.apply(DecayGrid::small_time(self.riesz.split_n))
    }

    pub fn near_origin_grid(&self) -> DecayGrid {
        self.small_time_decay_near_origin.apply(DecayGrid::near_origin(self.riesz.split_n))
    }

    pub fn large_time_grid(&self) -> DecayGrid {
        let s = &self.large_time_decay;
        DecaySpec { times: s.times.clone(), xs: s.xs.clone() }.apply(DecayGrid::large_time(self.riesz.split_n))
    }
}
