//! Acceptance criteria 1-11. Each test writes one `criterion N: PASS|FAIL`
//! line straight to stderr, so the lines show even when output is captured.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use riesz_cli::{run, ExperimentConfig, Summary};
use riesz_core::riesz::gamma_integral_quadrature;
use riesz_core::semigroup::{coordinate_trajectory, direct_mc, semigroup_one_ddim, time_mesh, Datum, Observable};
use riesz_core::verify::{
    certify_derivative_identity, certify_reflection_bound, certify_small_time_decay, certify_xexmax, DecayGrid,
    DerivativeGrid, ReflectionGrid,
};
use riesz_core::{Backend, GridOptions, PathConfig, Potential};
use riesz_oracles as oracle;

fn report(id: &str, pass: bool, detail: impl AsRef<str>) {
    let line = format!("criterion {id}: {} {}\n", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn grid() -> Backend {
    Backend::Grid(GridOptions::default())
}

fn mc(n_paths: usize, dt: f64, horizon: f64, seed: u64) -> Backend {
    Backend::MonteCarlo(PathConfig { n_paths, dt, horizon, seed, antithetic: false })
}

const TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

fn mesh() -> Vec<f64> {
    time_mesh(2.0, GridOptions::default().dt_max)
}

#[test]
fn criterion_01_mehler_agreement() {
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    let xs = [0.0, 1.0, 2.0];
    let g = coordinate_trajectory(&p, 0, Datum::One, &xs, &mesh(), &grid()).unwrap();
    let m = coordinate_trajectory(&p, 0, Datum::One, &xs, &mesh(), &mc(100_000, 1e-3, 2.0, 101)).unwrap();
    let (mut worst_rel, mut worst_z) = (0.0f64, 0.0f64);
    for (k, &x) in xs.iter().enumerate() {
        for &t in &TIMES {
            let exact = oracle::mehler_one(1.0, t, x);
            worst_rel = worst_rel.max((g.value(0, k, t) - exact).abs() / exact);
            let (se, disc) = m.errors(k, t);
            worst_z = worst_z.max(((m.value(0, k, t) - exact).abs() - disc) / se);
        }
    }
    let pass = worst_rel <= 1e-4 && worst_z <= 3.0;
    report("1", pass, format!("grid max rel err {worst_rel:.2e} (<= 1e-4); MC max |z| {worst_z:.2} (<= 3)"));
    assert!(pass);
}

#[test]
fn criterion_02_backend_cross_validation() {
    let xs = [0.0, 1.0, 2.0, 4.0];
    let mut worst = f64::NEG_INFINITY;
    for (alpha, seed) in [(1.0, 201), (2.0, 202)] {
        let p = Potential::constant(alpha, 1, 1.0).unwrap();
        let g = coordinate_trajectory(&p, 0, Datum::One, &xs, &mesh(), &grid()).unwrap();
        let m = coordinate_trajectory(&p, 0, Datum::One, &xs, &mesh(), &mc(100_000, 1e-3, 2.0, seed)).unwrap();
        for k in 0..xs.len() {
            for &t in &TIMES {
                let (se, mc_disc) = m.errors(k, t);
                let (_, grid_disc) = g.errors(k, t);
                let gap = (m.value(0, k, t) - g.value(0, k, t)).abs();
                worst = worst.max(gap - 3.0 * se - mc_disc - grid_disc);
            }
        }
    }
    let pass = worst <= 0.0;
    report("2", pass, format!("32 nodes, worst |MC - grid| - (3se + disc) = {worst:.3e} (<= 0)"));
    assert!(pass);
}

#[test]
fn criterion_03_factorization() {
    let base = Potential::seeded_uniform(1.0, 6, 0.5, 2.0, 7).unwrap();
    let cfg = PathConfig { n_paths: 50_000, dt: 1e-3, horizon: 1.0, seed: 303, antithetic: false };
    let mut worst = 0.0f64;
    let mut count = 0;
    for d in [2usize, 4, 6] {
        let p = base.prefix(d).unwrap();
        let points: Vec<Vec<f64>> = vec![
            vec![0.0; d],
            vec![0.5; d],
            (0..d).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            (0..d).map(|j| if j == 0 { 2.0 } else { 0.3 }).collect(),
        ];
        for x in &points {
            let direct = direct_mc(&p, x, 1.0, &cfg, Observable::One).unwrap();
            let prod = semigroup_one_ddim(&p, x, 1.0, &grid()).unwrap();
            let z = ((direct.value - prod.value).abs() - prod.discretization_error) / direct.std_error;
            worst = worst.max(z);
            count += 1;
        }
    }
    let pass = worst <= 3.0;
    report("3", pass, format!("{count} points, d in {{2,4,6}}, max |direct - product|/se = {worst:.2} (<= 3)"));
    assert!(pass);
}

#[test]
fn criterion_04_derivative_identity() {
    let p = Potential::constant(2.0, 1, 1.0).unwrap();
    let c = certify_derivative_identity(&p, &DerivativeGrid::default(), &grid()).unwrap();
    let worst = c.nodes.iter().map(|n| n.estimate / (n.bound - 1e-12)).fold(0.0f64, f64::max) * 1e-3;
    let pass = c.passed && c.nodes.len() == 12;
    report("4", pass, format!("{} nodes, max relative mismatch {worst:.2e} (<= 1e-3)", c.nodes.len()));
    assert!(pass);
}

#[test]
fn criterion_05_quadrature_oracle() {
    let mut worst = 0.0f64;
    let mut n = 0;
    for a in [0.5, 1.0, 5.0] {
        for beta in [1.0, 1.5, 2.0] {
            for gamma in [-0.5, 0.0, 1.0] {
                let q = gamma_integral_quadrature(a, beta, gamma, 1e-10).unwrap();
                let exact = oracle::gamma_integral(a, beta, gamma);
                worst = worst.max((q - exact).abs() / exact);
                n += 1;
            }
        }
    }
    let pass = n == 27 && worst <= 1e-6;
    report("5", pass, format!("{n} cases, max relative error {worst:.2e} (<= 1e-6)"));
    assert!(pass);
}

#[test]
fn criterion_06_reflection_bound() {
    let cfg = PathConfig { n_paths: 100_000, dt: 1e-4, horizon: 1.0, seed: 606, antithetic: false };
    let c = certify_reflection_bound(&cfg, &ReflectionGrid::default()).unwrap();
    let tested = c.nodes.iter().filter(|n| n.bound < 1.0).count();
    let pass = c.passed && tested > 0;
    report("6", pass, format!("{tested} non-vacuous nodes, worst relative margin {:.3} (>= 0)", c.worst_margin));
    assert!(pass);
}

#[test]
fn criterion_07_small_time_decay() {
    let grid_spec = DecayGrid::small_time(1.0);
    let mut fitted = Vec::new();
    for alpha in [1.0, 2.0] {
        let p = Potential::constant(alpha, 1, 1.0).unwrap();
        let c = certify_small_time_decay(&p, &grid_spec, &grid()).unwrap();
        fitted.push((alpha, c.fitted_constants["c_N"], c.passed));
    }
    // infimum of -log u/(t V(x)) over the same nodes, from the closed form
    let mut inf = f64::INFINITY;
    for &t in &grid_spec.times {
        for &x in &grid_spec.xs {
            inf = inf.min(-oracle::mehler_one(1.0, t, x).ln() / (t * x * x));
        }
    }
    let c2 = fitted[1].1;
    let rel = (c2 - inf).abs() / inf;
    let pass = fitted.iter().all(|f| f.1 > 0.0 && f.2) && rel <= 0.1;
    report(
        "7",
        pass,
        format!(
            "c_N(alpha=1) = {:.4}, c_N(alpha=2) = {c2:.4}, closed-form infimum {inf:.4}, rel diff {rel:.3} (<= 0.1)",
            fitted[0].1
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_xexmax() {
    let mut triples = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        for (c, n) in [(0.25, 1.0), (1.0, 1.0), (2.0, 4.0)] {
            triples.push((a, c, n));
        }
    }
    let cert = certify_xexmax(&triples).unwrap();
    let worst = cert.nodes.iter().map(|n| (n.estimate - n.bound).abs() / n.bound).fold(0.0f64, f64::max);
    let pass = cert.passed && cert.nodes.len() == 9 && cert.nodes.iter().all(|n| n.estimate <= n.bound * (1.0 + 1e-10));
    report("8", pass, format!("9 triples, max |max - bound|/bound = {worst:.2e} (<= 1e-10)"));
    assert!(pass);
}

fn default_config() -> ExperimentConfig {
    ExperimentConfig::load(&workspace().join("configs/default.toml")).unwrap()
}

fn default_run(only: &'static str) -> Summary {
    let out = tempfile::tempdir().unwrap();
    run(&default_config(), Some(only), out.path()).unwrap().summary
}

fn sweep_summary() -> &'static Summary {
    static CELL: OnceLock<Summary> = OnceLock::new();
    CELL.get_or_init(|| default_run("dimension_sweep"))
}

#[test]
fn criterion_09a_dimension_trend() {
    let s = sweep_summary();
    let mut lines = Vec::new();
    let mut pass = s.sweeps.len() == 6;
    for w in &s.sweeps {
        pass &= w.trend_ok && w.dims == [1, 2, 4, 8, 16];
        lines.push(format!("a={} alpha={} slope {:.4}±{:.4}", w.a, w.alpha, w.slope.slope, w.slope.slope_se));
    }
    report("9a", pass, format!("log-log slope <= 2se for every sweep: {}", lines.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_09b_unit_ceiling() {
    let s = sweep_summary();
    let mut pass = true;
    let mut lines = Vec::new();
    for w in s.sweeps.iter().filter(|w| w.a == 1.0) {
        let c = w.ceiling.as_ref().expect("a = 1 sweeps carry a ceiling check");
        pass &= c.passed;
        let mut ds: Vec<usize> = c.violations.iter().map(|v| v.0).collect();
        ds.dedup();
        lines.push(format!("alpha={} worst excess {:.4} at d = {ds:?}", w.alpha, c.worst_excess));
    }
    report("9b", pass, format!("a = 1 values <= 1 + combined error: {}", lines.join("; ")));
    assert!(pass);
}

fn l1_summary() -> &'static Summary {
    static CELL: OnceLock<Summary> = OnceLock::new();
    CELL.get_or_init(|| default_run("l1_side"))
}

#[test]
fn criterion_10_l1_side() {
    let s = l1_summary();
    let trend = s.sweeps.iter().all(|w| w.trend_ok && w.dims == [1, 2, 4, 8]);
    let unity = s.sweeps.iter().filter(|w| w.a == 1.0).all(|w| w.ceiling.as_ref().is_some_and(|c| c.passed));
    let mut holder_nodes = 0;
    let mut holder_ok = true;
    let mut worst = f64::INFINITY;
    for e in &s.certificates {
        for n in e.certificate.nodes.iter().filter(|n| n.note.as_deref() == Some("Hölder inequality")) {
            holder_nodes += 1;
            holder_ok &= n.margin >= 0.0;
            worst = worst.min(n.margin);
        }
    }
    let per_alpha = holder_nodes / s.certificates.len().max(1);
    let pass = s.sweeps.len() == 4 && trend && unity && holder_ok && per_alpha == 12;
    report(
        "10",
        pass,
        format!(
            "slope test {trend}, a = 1 telescope {unity}, Hölder {holder_nodes} nodes ({per_alpha} per alpha) worst margin {worst:.3}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_determinism() {
    let bin = env!("CARGO_BIN_EXE_riesz");
    let config = workspace().join("configs/quick.toml");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = Command::new(bin).arg("run").arg(&config).arg("--out").arg(d.path()).output().unwrap().status;
        assert!(status.code().is_some_and(|c| c == 0 || c == 1), "{status:?}");
    }
    let listing = |p: &Path| {
        let mut names: Vec<PathBuf> = std::fs::read_dir(p).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        names
    };
    let (a, b) = (listing(dirs[0].path()), listing(dirs[1].path()));
    let mut same = a.len() == b.len() && a.len() > 1;
    for (x, y) in a.iter().zip(&b) {
        same &= x.file_name() == y.file_name() && std::fs::read(x).unwrap() == std::fs::read(y).unwrap();
    }
    report("11", same, format!("{} report files byte-identical across two runs", a.len()));
    assert!(same);
}
