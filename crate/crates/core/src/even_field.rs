//! Even states of the closed string and the traveling-wave reduction.
//!
//! A state is a pair `(f0, f1)` of even functions on the circle
//! `R / 2πZ` (displacement and velocity). The combination
//! `g = ∂f0/∂x + f1` turns the wave equation into transport along
//! `x + t = const`; its odd part is `∂f0/∂x` and its even part is `f1`,
//! so `g` carries the whole state up to the additive constant of `f0`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Finite even cosine series `x ↦ Σ c_n cos(n x)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvenFourier {
    coeffs: Vec<f64>,
}

impl EvenFourier {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// A single cosine mode `amplitude · cos(n x)`.
    pub fn mode(n: usize, amplitude: f64) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = amplitude;
        Self { coeffs }
    }

    /// Builds a series from sparse `(n, value)` pairs; repeated indices add up.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let len = pairs.iter().map(|&(n, _)| n + 1).max().unwrap_or(0);
        let mut coeffs = vec![0.0; len];
        for &(n, c) in pairs {
            coeffs[n] += c;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `cos(n x)`, zero beyond the stored degree.
    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    /// Highest index with a nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * (n as f64 * x).cos())
            .sum()
    }

    /// Value of the derivative `-Σ n c_n sin(n x)`.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| -(n as f64) * c * (n as f64 * x).sin())
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect(),
        }
    }
}

/// Displacement and velocity of the string as cosine series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatePair {
    pub f0: EvenFourier,
    pub f1: EvenFourier,
}

impl StatePair {
    pub fn new(f0: EvenFourier, f1: EvenFourier) -> Self {
        Self { f0, f1 }
    }

    pub fn degree(&self) -> usize {
        self.f0.degree().max(self.f1.degree())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.f0.scaled(factor), self.f1.scaled(factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.f0.add(&other.f0), self.f1.add(&other.f1))
    }
}

/// Samples of a function on the uniform grid `x_j = 2πj/m`, `j = 0..m`.
///
/// `m` is even so that the reflection `x ↦ -x` maps grid points to grid
/// points (`-x_j ≡ x_{m-j}`).
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    values: Vec<f64>,
}

impl CircleGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid_size(values.len())?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Self::new(vec![0.0; m])
    }

    pub fn constant(m: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; m])
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid_size(m)?;
        let h = TAU / m as f64;
        Self::new((0..m).map(|j| f(j as f64 * h)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid spacing `2π/m`.
    pub fn spacing(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// Index of the grid point nearest to the angle `x` (reduced mod 2π).
    pub fn nearest_index(&self, x: f64) -> usize {
        let m = self.values.len() as i64;
        let k = (x / self.spacing()).round() as i64;
        k.rem_euclid(m) as usize
    }

    /// Value at the grid point nearest to `x`.
    pub fn sample(&self, x: f64) -> f64 {
        self.values[self.nearest_index(x)]
    }

    /// Index of the reflected point `-x_j`.
    pub fn mirror(&self, j: usize) -> usize {
        let m = self.values.len();
        (m - j) % m
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Unnormalized `max_j |g_j|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise map, keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }
}

fn check_grid_size(m: usize) -> Result<()> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidGrid { m });
    }
    Ok(())
}

/// Displacement and velocity sampled on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub f0: CircleGrid,
    pub f1: CircleGrid,
}

impl GridState {
    /// `g = ∂f0/∂x + f1`, differentiating `f0` by centered differences.
    ///
    /// Second-order accurate for smooth `f0`, and `g_0 = f1_0` exactly for
    /// even `f0`.
    pub fn traveling_wave(&self) -> CircleGrid {
        let m = self.f0.len();
        let h = self.f0.spacing();
        let f0 = self.f0.values();
        let values = (0..m)
            .map(|j| {
                let next = f0[(j + 1) % m];
                let prev = f0[(j + m - 1) % m];
                (next - prev) / (2.0 * h) + self.f1.values()[j]
            })
            .collect();
        CircleGrid { values }
    }
}

/// Which terminal manifold the ρ-functional measures distance to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Stop moving: terminal states are constant displacements at rest.
    StopMoving,
    /// Oscillation damping: any constant displacement and velocity.
    Damping,
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "stop" | "stop-moving" | "StopMoving" => Ok(Problem::StopMoving),
            "damp" | "damping" | "Damping" => Ok(Problem::Damping),
            other => Err(format!("unknown problem `{other}` (expected stop|damp)")),
        }
    }
}

/// Minimum degree-to-grid ratio: `m >= 2·degree + 2`.
pub fn required_grid(degree: usize) -> usize {
    2 * degree + 2
}

/// Samples `g = ∂f0/∂x + f1` exactly from the cosine coefficients.
pub fn to_traveling_wave(f: &StatePair, m: usize) -> Result<CircleGrid> {
    check_grid_size(m)?;
    let degree = f.degree();
    let required = required_grid(degree);
    if m < required {
        return Err(Error::Resolution {
            m,
            degree,
            required,
        });
    }
    CircleGrid::from_fn(m, |x| f.f0.eval_derivative(x) + f.f1.eval(x))
}

/// Splits samples into even and odd parts under `x ↦ -x`.
pub fn split_even_odd(g: &CircleGrid) -> (CircleGrid, CircleGrid) {
    let v = g.values();
    let (even, odd): (Vec<f64>, Vec<f64>) = (0..v.len())
        .map(|j| {
            let r = v[g.mirror(j)];
            (0.5 * (v[j] + r), 0.5 * (v[j] - r))
        })
        .unzip();
    // Both halves inherit finiteness from `g`.
    (CircleGrid { values: even }, CircleGrid { values: odd })
}

/// Cumulative trapezoidal integral `F_j ≈ ∫_0^{x_j} f`, with `F_0 = 0`.
pub fn cumulative_trapezoid(f: &CircleGrid) -> CircleGrid {
    let h = f.spacing();
    let v = f.values();
    let mut acc = 0.0;
    let mut values = Vec::with_capacity(v.len());
    values.push(0.0);
    for j in 1..v.len() {
        acc += 0.5 * h * (v[j - 1] + v[j]);
        values.push(acc);
    }
    CircleGrid { values }
}

/// Recovers `(f0, f1)` on the grid from `g`, fixing `f0(0) = 0`.
pub fn reconstruct_state(g: &CircleGrid) -> GridState {
    let (even, odd) = split_even_odd(g);
    GridState {
        f0: cumulative_trapezoid(&odd),
        f1: even,
    }
}

/// The ρ-functional, normalized with the factor 2π so that it measures time.
///
/// `StopMoving` gives `2π·max|g|`; `Damping` minimizes over constant shifts,
/// giving `π·(max g − min g)`.
pub fn rho(g: &CircleGrid, problem: Problem) -> f64 {
    match problem {
        Problem::StopMoving => TAU * g.sup_norm(),
        Problem::Damping => PI * (g.max() - g.min()),
    }
}
