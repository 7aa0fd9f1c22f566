//! Profiles evolved along characteristics, and the ρ time series.
//!
//! Time is measured in grid steps `h = 2π/m`. At step `τ` the point with
//! grid index `a` lies on the characteristic that started at index
//! `(a + τ) mod m`, and every characteristic crosses the load point once
//! per `m` steps. A history of kicks at those crossings determines the
//! whole evolution, closed loop or open loop alike.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::even_field::{rho, CircleGrid, Problem};

/// Which value a profile reports at the load point at the instant a kick
/// is being applied there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadPoint {
    /// The incoming value; this is what a restart must use as initial data.
    #[default]
    BeforeKick,
    /// Half of the jump applied, matching the `½ v` term of the per-period
    /// inclusion: at `z = 0` this is exactly `φ(t)`.
    Midpoint,
    /// The full jump applied.
    AfterKick,
}

impl LoadPoint {
    pub fn weight(self) -> f64 {
        match self {
            LoadPoint::BeforeKick => 0.0,
            LoadPoint::Midpoint => 0.5,
            LoadPoint::AfterKick => 1.0,
        }
    }
}

/// Nearest grid time step for `t`.
pub fn time_index(t: f64, m: usize) -> usize {
    (t / (TAU / m as f64)).round().max(0.0) as usize
}

/// A record of the kicks received at the load point.
///
/// Crossing `σ` belongs to the characteristic `σ mod m`, on its
/// `σ / m`-th pass.
pub trait KickHistory {
    /// Initial profile `g(·, 0)`.
    fn initial(&self) -> &CircleGrid;

    /// Number of computed crossing steps; valid steps are `0..steps()`.
    fn steps(&self) -> usize;

    /// Value carried into the load point at step `σ`.
    fn before_kick(&self, step: usize) -> f64;

    /// Increment applied at step `σ` (the control `u` at that time).
    fn kick(&self, step: usize) -> f64;

    fn grid_size(&self) -> usize {
        self.initial().len()
    }

    fn spacing(&self) -> f64 {
        self.initial().spacing()
    }

    /// Largest time the history covers.
    fn horizon(&self) -> f64 {
        self.steps().saturating_sub(1) as f64 * self.spacing()
    }

    fn check_step(&self, step: usize) -> Result<()> {
        if step >= self.steps() {
            return Err(Error::BeyondHorizon {
                t: step as f64 * self.spacing(),
                horizon: self.horizon(),
            });
        }
        Ok(())
    }

    /// `g(x_a, τh)`; `load_point` only matters at `a = 0`.
    fn value(&self, a: usize, step: usize, load_point: LoadPoint) -> Result<f64> {
        self.check_step(step)?;
        Ok(self.value_unchecked(a, step, load_point))
    }

    #[doc(hidden)]
    fn value_unchecked(&self, a: usize, step: usize, load_point: LoadPoint) -> f64 {
        let m = self.grid_size();
        if a == 0 {
            return self.before_kick(step) + load_point.weight() * self.kick(step);
        }
        // latest past crossing of the characteristic now at x_a
        match (step + a).checked_sub(m) {
            Some(last) => self.before_kick(last) + self.kick(last),
            None => self.initial().values()[a + step],
        }
    }

    /// Whole profile `g(·, τh)`.
    fn profile(&self, step: usize, load_point: LoadPoint) -> Result<CircleGrid> {
        self.check_step(step)?;
        let m = self.grid_size();
        let values = (0..m)
            .map(|a| self.value_unchecked(a, step, load_point))
            .collect();
        CircleGrid::new(values)
    }

    /// `g(z, t)` at the nearest grid point and time step.
    fn field_at(&self, z: f64, t: f64, load_point: LoadPoint) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeHorizon(t));
        }
        let a = self.initial().nearest_index(z);
        let step = time_index(t, self.grid_size());
        self.value(a, step, load_point)
    }

    /// ρ series, control and load-point trace at the given steps.
    ///
    /// ρ is taken on [`LoadPoint::BeforeKick`] profiles, so `ρ(0)` is the
    /// value of the initial data; the load-point trace uses the midpoint.
    fn record(&self, steps: &[usize]) -> Result<TrajectoryRecord> {
        let mut rec = TrajectoryRecord::with_capacity(steps.len());
        for &step in steps {
            let g = self.profile(step, LoadPoint::BeforeKick)?;
            rec.times.push(step as f64 * self.spacing());
            rec.rho_stop.push(rho(&g, Problem::StopMoving));
            rec.rho_damp.push(rho(&g, Problem::Damping));
            rec.u.push(self.kick(step));
            rec.phi0.push(self.value_unchecked(0, step, LoadPoint::Midpoint));
        }
        Ok(rec)
    }
}

/// Default sample steps up to `last`: every period boundary, `intra`
/// equally spaced samples inside each period, and `last` itself.
pub fn sample_steps(m: usize, last: usize, intra: usize) -> Vec<usize> {
    let per_period = intra + 1;
    let mut steps = Vec::new();
    let mut base = 0;
    while base <= last {
        for i in 0..per_period {
            let s = base + (i * m + per_period / 2) / per_period;
            if s <= last {
                steps.push(s);
            }
        }
        base += m;
    }
    steps.push(last);
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// Intra-period samples used when no schedule is given.
pub const DEFAULT_INTRA_SAMPLES: usize = 8;

/// Time series of ρ for both problems, the realized control and `g(0, t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub rho_stop: Vec<f64>,
    pub rho_damp: Vec<f64>,
    pub u: Vec<f64>,
    pub phi0: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            rho_stop: Vec::with_capacity(n),
            rho_damp: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            phi0: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn rho(&self, problem: Problem) -> &[f64] {
        match problem {
            Problem::StopMoving => &self.rho_stop,
            Problem::Damping => &self.rho_damp,
        }
    }

    /// `(ρ(0) − ρ(T)) / T` between the first and last samples.
    pub fn decay(&self, problem: Problem) -> DecaySummary {
        let series = self.rho(problem);
        let (Some(&rho0), Some(&rho_t), Some(&t0), Some(&t1)) = (
            series.first(),
            series.last(),
            self.times.first(),
            self.times.last(),
        ) else {
            return DecaySummary::degenerate(0.0, 0.0, 0.0);
        };
        let horizon = t1 - t0;
        if horizon <= 0.0 || rho0 == 0.0 {
            return DecaySummary::degenerate(rho0, rho_t, horizon);
        }
        DecaySummary {
            rho0,
            rho_t,
            horizon,
            rate: (rho0 - rho_t) / horizon,
            degenerate: false,
        }
    }
}

/// Average decay rate of ρ over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySummary {
    pub rho0: f64,
    pub rho_t: f64,
    pub horizon: f64,
    pub rate: f64,
    /// Set when `T = 0` or `ρ(0) = 0`; the rate is then reported as 0.
    pub degenerate: bool,
}

impl DecaySummary {
    fn degenerate(rho0: f64, rho_t: f64, horizon: f64) -> Self {
        Self {
            rho0,
            rho_t,
            horizon,
            rate: 0.0,
            degenerate: true,
        }
    }

    /// `M = min(ρ(0), ρ(T))`.
    pub fn level(&self) -> f64 {
        self.rho0.min(self.rho_t)
    }
}
