//! Momenta, support functions of reachable sets and the dry-friction law.
//!
//! A momentum `ξ = (ξ0, ξ1)` pairs with states through
//! `ζ(t) = ξ1(t) + ∫_0^t ξ0`. The support function of the reachable set
//! `D(T)` is `∫_0^T |ζ|`, and its per-unit-time limit `H_Ω` is the mean of
//! `|ζ|` over one period.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::even_field::{cumulative_trapezoid, split_even_odd, CircleGrid, EvenFourier, GridState};

/// Bisection stops once the bracket is this narrow.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Gauss–Legendre order used on each smooth piece of `|ζ|`.
const QUADRATURE_ORDER: usize = 20;

/// Pair of even cosine series `(ξ0, ξ1)` with coefficients `φ_n`, `ψ_n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Momentum {
    pub xi0: EvenFourier,
    pub xi1: EvenFourier,
}

impl Momentum {
    pub fn new(xi0: EvenFourier, xi1: EvenFourier) -> Self {
        Self { xi0, xi1 }
    }

    /// Builds a momentum from sparse `(n, φ_n)` and `(n, ψ_n)` pairs.
    pub fn from_pairs(phi: &[(usize, f64)], psi: &[(usize, f64)]) -> Result<Self> {
        Ok(Self::new(
            EvenFourier::from_pairs(phi)?,
            EvenFourier::from_pairs(psi)?,
        ))
    }

    pub fn phi(&self, n: usize) -> f64 {
        self.xi0.coeff(n)
    }

    pub fn psi(&self, n: usize) -> f64 {
        self.xi1.coeff(n)
    }

    pub fn degree(&self) -> usize {
        self.xi0.degree().max(self.xi1.degree())
    }

    pub fn is_zero(&self) -> bool {
        self.xi0.is_zero() && self.xi1.is_zero()
    }

    /// `ζ` is 2π-periodic exactly when the drift `φ_0` vanishes.
    pub fn is_periodic(&self) -> bool {
        self.phi(0) == 0.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.xi0.scaled(factor), self.xi1.scaled(factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.xi0.add(&other.xi0), self.xi1.add(&other.xi1))
    }

    fn require_periodic(&self) -> Result<()> {
        if self.is_periodic() {
            Ok(())
        } else {
            Err(Error::NonPeriodicMomentum(self.phi(0)))
        }
    }
}

/// `ζ(t) = ψ_0 + φ_0 t + Σ_{n≥1} (ψ_n cos nt + (φ_n/n) sin nt)`.
pub fn zeta(xi: &Momentum, t: f64) -> f64 {
    let len = xi.xi0.coeffs().len().max(xi.xi1.coeffs().len());
    let mut acc = xi.psi(0) + xi.phi(0) * t;
    for n in 1..len {
        let nf = n as f64;
        let (s, c) = (nf * t).sin_cos();
        acc += xi.psi(n) * c + xi.phi(n) / nf * s;
    }
    acc
}

/// Antiderivative of `ζ` vanishing at `t = 0`.
pub fn zeta_integral(xi: &Momentum, t: f64) -> f64 {
    let len = xi.xi0.coeffs().len().max(xi.xi1.coeffs().len());
    let mut acc = xi.psi(0) * t + 0.5 * xi.phi(0) * t * t;
    for n in 1..len {
        let nf = n as f64;
        let (s, c) = (nf * t).sin_cos();
        acc += xi.psi(n) / nf * s + xi.phi(n) / (nf * nf) * (1.0 - c);
    }
    acc
}

/// Sign changes of `ζ` in `(a, b)`, each refined by bisection.
///
/// `ζ` is scanned on a mesh of `32` points per oscillation of its highest
/// mode; exact zeros on the mesh are reported as they are.
pub fn zeta_roots(xi: &Momentum, a: f64, b: f64) -> Vec<f64> {
    if b <= a {
        return Vec::new();
    }
    let per_period = 32 * xi.degree().max(1);
    let cells = ((b - a) / TAU * per_period as f64).ceil().max(1.0) as usize;
    let step = (b - a) / cells as f64;

    let mut roots = Vec::new();
    let mut left = a;
    let mut z_left = zeta(xi, a);
    for i in 1..=cells {
        let right = if i == cells { b } else { a + i as f64 * step };
        let z_right = zeta(xi, right);
        if z_right == 0.0 && i < cells {
            roots.push(right);
        } else if z_left * z_right < 0.0 {
            roots.push(bisect(xi, left, right, z_left));
        }
        left = right;
        z_left = z_right;
    }
    roots
}

fn bisect(xi: &Momentum, mut lo: f64, mut hi: f64, z_lo: f64) -> f64 {
    let lo_positive = z_lo > 0.0;
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let z = zeta(xi, mid);
        if z == 0.0 {
            return mid;
        }
        if (z > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(QUADRATURE_ORDER).expect("valid quadrature order"))
}

/// Support function of the reachable set `D(T)`: `∫_0^T |ζ(t)| dt`.
///
/// `|ζ|` is split at its sign changes; each smooth piece is integrated by
/// composite Gauss–Legendre on panels no wider than a quarter of the
/// shortest wavelength.
pub fn support_d(xi: &Momentum, horizon: f64) -> Result<f64> {
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::NegativeHorizon(horizon));
    }
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre();
    let panel = TAU / (4.0 * xi.degree().max(1) as f64);
    let mut breaks = vec![0.0];
    breaks.extend(zeta_roots(xi, 0.0, horizon));
    breaks.push(horizon);

    let total = breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let panels = ((b - a) / panel).ceil().max(1.0) as usize;
            let width = (b - a) / panels as f64;
            let signed: f64 = (0..panels)
                .map(|k| {
                    let lo = a + k as f64 * width;
                    let hi = if k + 1 == panels { b } else { lo + width };
                    rule.integrate(lo, hi, |t| zeta(xi, t))
                })
                .sum();
            signed.abs()
        })
        .sum();
    Ok(total)
}

/// Support function of the limit set `Ω`: `(1/2π) ∫_0^{2π} |ζ(t)| dt`.
///
/// Uses the closed-form antiderivative of `ζ` between consecutive sign
/// changes, so it shares only root location with [`support_d`].
pub fn support_omega(xi: &Momentum) -> Result<f64> {
    xi.require_periodic()?;
    let mut breaks = vec![0.0];
    breaks.extend(zeta_roots(xi, 0.0, TAU));
    breaks.push(TAU);
    let total: f64 = breaks
        .windows(2)
        .map(|w| (zeta_integral(xi, w[1]) - zeta_integral(xi, w[0])).abs())
        .sum();
    Ok(total / TAU)
}

/// `sign` with `sign(0) = 0`.
pub fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Steepest-descent state for the horizon `T`:
/// `f1 = T·(sign ζ)⁺`, `f0(x) = -T ∫_0^x (sign ζ)⁻`, sampled on `m` points.
///
/// Isolated zeros of `ζ` take `sign = 0`, including grid points where `ζ`
/// is zero up to round-off.
pub fn steepest_state(xi: &Momentum, horizon: f64, m: usize) -> Result<GridState> {
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::NegativeHorizon(horizon));
    }
    xi.require_periodic()?;
    if xi.is_zero() {
        return Err(Error::DegenerateMomentum);
    }
    // values within round-off of zero count as zeros of ζ
    let scale: f64 = xi.xi0.coeffs().iter().chain(xi.xi1.coeffs()).map(|c| c.abs()).sum();
    let floor = 64.0 * f64::EPSILON * scale;
    let signs = CircleGrid::from_fn(m, |x| {
        let z = zeta(xi, x);
        if z.abs() <= floor {
            0.0
        } else {
            sign0(z)
        }
    })?;
    let (even, odd) = split_even_odd(&signs);
    let f1 = even.map(|v| horizon * v)?;
    let f0 = cumulative_trapezoid(&odd).map(|v| -horizon * v)?;
    Ok(GridState { f0, f1 })
}

/// Weight of the `n`-th cosine coefficient in the pairing
/// `⟨a, b⟩ = (1/2π) ∫_0^{2π} a·b`.
pub fn pairing_weight(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        0.5
    }
}

/// `⟨ξ, f⟩ = Σ_n w_n (φ_n a_n + ψ_n b_n)` for cosine coefficients `a`
/// of `f0` and `b` of `f1`.
pub fn pairing(xi: &Momentum, f0: &[f64], f1: &[f64]) -> f64 {
    let len = f0.len().max(f1.len());
    (0..len)
        .map(|n| {
            let a = f0.get(n).copied().unwrap_or(0.0);
            let b = f1.get(n).copied().unwrap_or(0.0);
            pairing_weight(n) * (xi.phi(n) * a + xi.psi(n) * b)
        })
        .sum()
}

/// Dry-friction feedback at the load point: `u = -sign g(0)`, with `0`
/// returned on the switching surface.
pub fn dry_friction_control(g: &CircleGrid) -> f64 {
    -sign0(g.values()[0])
}
