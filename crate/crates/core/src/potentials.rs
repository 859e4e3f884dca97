//! Coordinate-separable power potentials `V(x) = Σ_i κ_i |x_i|^α`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Per-coordinate potential evaluation, shared by the path and grid kernels.
pub trait SeparablePotential: Sync + Send {
    fn dim(&self) -> usize;

    /// `V_i(xi)` without bounds checking on `i`.
    fn coordinate_value(&self, i: usize, xi: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PowerLaw {
    Linear,
    Quadratic,
    General(f64),
}

impl PowerLaw {
    fn new(alpha: f64) -> Self {
        if alpha == 1.0 {
            PowerLaw::Linear
        } else if alpha == 2.0 {
            PowerLaw::Quadratic
        } else {
            PowerLaw::General(alpha)
        }
    }

    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            PowerLaw::Linear => x.abs(),
            PowerLaw::Quadratic => x * x,
            PowerLaw::General(alpha) => x.abs().powf(alpha),
        }
    }
}

/// How the coefficients `κ_i` are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum CoefficientRule {
    /// Every coordinate uses `value`.
    Constant { value: f64 },
    /// `κ_i = m + (M - m) U_i` with `U_i` drawn from a seeded stream. The
    /// sequence does not depend on `d`, so smaller dimensions see a prefix.
    SeededUniform { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    alpha: f64,
    coefficients: Vec<f64>,
    m_lower: f64,
    m_upper: f64,
    law: PowerLaw,
    degenerate: bool,
    exploratory: bool,
}

impl SeparablePotential for Potential {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    #[inline]
    fn coordinate_value(&self, i: usize, xi: f64) -> f64 {
        self.coefficients[i] * self.law.apply(xi)
    }
}

impl Potential {
    /// Builds a potential and checks `0 < α ≤ 2` and
    /// `0 < m ≤ min κ_i ≤ max κ_i ≤ M`.
    pub fn new(alpha: f64, coefficients: Vec<f64>, m_lower: f64, m_upper: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid(format!("exponent alpha must lie in (0, 2], got {alpha}")));
        }
        Self::build(alpha, coefficients, m_lower, m_upper, false)
    }

    /// Like [`Potential::new`] but admits `2 < α ≤ 4`. Such potentials fall
    /// outside the boundedness theorems and are tagged exploratory.
    pub fn exploratory(alpha: f64, coefficients: Vec<f64>, m_lower: f64, m_upper: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 4.0) {
            return Err(invalid(format!("exploratory exponent must lie in (0, 4], got {alpha}")));
        }
        Self::build(alpha, coefficients, m_lower, m_upper, alpha > 2.0)
    }

    fn build(alpha: f64, coefficients: Vec<f64>, m_lower: f64, m_upper: f64, exploratory: bool) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(invalid("potential needs at least one coordinate"));
        }
        if !(m_lower > 0.0 && m_lower.is_finite() && m_upper.is_finite() && m_lower <= m_upper) {
            return Err(invalid(format!("need 0 < m <= M, got m = {m_lower}, M = {m_upper}")));
        }
        if let Some(k) = coefficients.iter().find(|&&k| !(k >= m_lower && k <= m_upper)) {
            return Err(invalid(format!("coefficient {k} outside [{m_lower}, {m_upper}]")));
        }
        Ok(Self { alpha, coefficients, m_lower, m_upper, law: PowerLaw::new(alpha), degenerate: false, exploratory })
    }

    /// `κ_i = κ` for every coordinate, with `m = M = κ`.
    pub fn constant(alpha: f64, d: usize, kappa: f64) -> Result<Self> {
        Self::new(alpha, vec![kappa; d], kappa, kappa)
    }

    /// Coefficients drawn uniformly from `[m, M]` by a seeded stream.
    pub fn seeded_uniform(alpha: f64, d: usize, m_lower: f64, m_upper: f64, seed: u64) -> Result<Self> {
        Self::new(alpha, seeded_coefficients(d, m_lower, m_upper, seed), m_lower, m_upper)
    }

    pub fn from_rule(alpha: f64, d: usize, m_lower: f64, m_upper: f64, rule: &CoefficientRule) -> Result<Self> {
        let coefficients = match *rule {
            CoefficientRule::Constant { value } => vec![value; d],
            CoefficientRule::SeededUniform { seed } => seeded_coefficients(d, m_lower, m_upper, seed),
        };
        if alpha > 2.0 {
            Self::exploratory(alpha, coefficients, m_lower, m_upper)
        } else {
            Self::new(alpha, coefficients, m_lower, m_upper)
        }
    }

    /// The zero potential `V ≡ 0` in `d` dimensions. It violates `m > 0`
    /// and exists only so tests can use the exact value `e^{-tL}1 = 1`.
    pub fn zero(d: usize) -> Self {
        Self {
            alpha: 2.0,
            coefficients: vec![0.0; d.max(1)],
            m_lower: 0.0,
            m_upper: 0.0,
            law: PowerLaw::Quadratic,
            degenerate: true,
            exploratory: false,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn m_lower(&self) -> f64 {
        self.m_lower
    }

    pub fn m_upper(&self) -> f64 {
        self.m_upper
    }

    /// True for the test-only zero potential.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn is_exploratory(&self) -> bool {
        self.exploratory
    }

    /// `A = 2^α M / m`: for `|x_i - y_i| ≤ |x_i|/2`,
    /// `V_i(y)/V_i(x) ∈ [1/A, A]`.
    pub fn comparability_constant(&self) -> f64 {
        2f64.powf(self.alpha) * self.m_upper / self.m_lower
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            Err(Error::IndexOutOfRange { index: i, dim: self.dim() })
        } else {
            Ok(())
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() })
        } else {
            Ok(())
        }
    }

    /// `V_i(xi) = κ_i |xi|^α` (0-based `i`).
    pub fn eval_coordinate(&self, i: usize, xi: f64) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.coordinate_value(i, xi))
    }

    /// `V(x) = Σ_i V_i(x_i)`.
    pub fn eval_total(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.total_unchecked(x))
    }

    pub(crate) fn total_unchecked(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(i, &xi)| self.coordinate_value(i, xi)).sum()
    }

    /// `V(x)^a`, with the continuous extension `0^a = 0`.
    pub fn eval_power(&self, x: &[f64], a: f64) -> Result<f64> {
        if !(a > 0.0) {
            return Err(invalid(format!("power must be positive, got {a}")));
        }
        let v = self.eval_total(x)?;
        Ok(if v == 0.0 { 0.0 } else { v.powf(a) })
    }

    /// One-dimensional potential of coordinate `i`.
    pub fn restrict(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        Ok(Self { coefficients: vec![self.coefficients[i]], ..self.clone() })
    }

    /// The potential of the first `d` coordinates.
    pub fn prefix(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: d });
        }
        Ok(Self { coefficients: self.coefficients[..d].to_vec(), ..self.clone() })
    }

    /// Same shape with every coefficient multiplied by `factor >= 1`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(invalid(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Self {
            coefficients: self.coefficients.iter().map(|k| k * factor).collect(),
            m_lower: self.m_lower * factor,
            m_upper: self.m_upper * factor,
            ..self.clone()
        })
    }

    pub fn truncate(&self, cap: f64) -> Result<TruncatedPotential> {
        TruncatedPotential::new(self.clone(), cap)
    }
}

fn seeded_coefficients(d: usize, m_lower: f64, m_upper: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..d).map(|_| m_lower + (m_upper - m_lower) * rng.random::<f64>()).collect()
}

/// `V_i^n = min(V_i, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPotential {
    base: Potential,
    cap: f64,
}

impl TruncatedPotential {
    pub fn new(base: Potential, cap: f64) -> Result<Self> {
        if !(cap >= 0.0) {
            return Err(invalid(format!("truncation cap must be non-negative, got {cap}")));
        }
        Ok(Self { base, cap })
    }

    pub fn base(&self) -> &Potential {
        &self.base
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn eval_coordinate(&self, i: usize, xi: f64) -> Result<f64> {
        Ok(self.base.eval_coordinate(i, xi)?.min(self.cap))
    }

    pub fn restrict(&self, i: usize) -> Result<Self> {
        Ok(Self { base: self.base.restrict(i)?, cap: self.cap })
    }
}

impl SeparablePotential for TruncatedPotential {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    #[inline]
    fn coordinate_value(&self, i: usize, xi: f64) -> f64 {
        self.base.coordinate_value(i, xi).min(self.cap)
    }
}
