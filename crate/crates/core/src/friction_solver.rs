//! Exact motion of the string under the dry-friction feedback
//! `u = -sign g(0, t)`.
//!
//! Along each characteristic the load-point value solves, once per period,
//! the scalar inclusion `φ + ½·sign φ ∋ G`, and the next period starts
//! from `G − v`. Only algebra is involved; no time stepping.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::even_field::CircleGrid;
use crate::trajectory::{sample_steps, time_index, KickHistory, TrajectoryRecord, DEFAULT_INTRA_SAMPLES};

/// Solves `φ + ½ v = G` with `v ∈ sign φ`, where `sign 0 = [−1, 1]`.
///
/// Returns `(φ, v)`. For `|G| ≤ ½` the solution slides: `φ = 0`, `v = 2G`.
pub fn solve_scalar_inclusion(g: f64) -> (f64, f64) {
    if g > 0.5 {
        (g - 0.5, 1.0)
    } else if g < -0.5 {
        (g + 0.5, -1.0)
    } else {
        (0.0, 2.0 * g)
    }
}

/// One pass of a characteristic through the load point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicStep {
    /// `φ`, the load-point value.
    pub phi: f64,
    /// Realized sign selection; the control applied is `-v`.
    pub v: f64,
    /// Right-hand side `G_j` of the inclusion on this pass.
    pub rhs: f64,
}

impl CharacteristicStep {
    fn from_rhs(rhs: f64) -> Self {
        let (phi, v) = solve_scalar_inclusion(rhs);
        Self { phi, v, rhs }
    }

    fn next(self) -> Self {
        Self::from_rhs(self.rhs - self.v)
    }
}

/// Iterates `G_{j+1} = G_j − v_j` for `periods` periods, returning the
/// passes `j = 0..=periods`.
pub fn evolve_characteristic(g0: f64, periods: usize) -> Vec<CharacteristicStep> {
    let mut steps = Vec::with_capacity(periods + 1);
    let mut step = CharacteristicStep::from_rhs(g0);
    steps.push(step);
    for _ in 0..periods {
        step = step.next();
        steps.push(step);
    }
    steps
}

/// Load-point trace `φ(t) = g(0, t)` with its sign selection.
///
/// Sample `σ` is the time `σ·h`, `h = 2π/m`, and belongs to the
/// characteristic that started at grid index `σ mod m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingSignal {
    initial: CircleGrid,
    periods: usize,
    phi: Vec<f64>,
    v: Vec<f64>,
    rhs: Vec<f64>,
}

impl SlidingSignal {
    pub fn grid_size(&self) -> usize {
        self.initial.len()
    }

    /// Number of whole periods stored; the trace covers `[0, 2π·periods)`.
    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Realized control `u = −v`.
    pub fn control(&self) -> Vec<f64> {
        self.v.iter().map(|v| -v).collect()
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.initial.spacing()
    }

    /// Passes of the characteristic starting at `x_c`.
    pub fn characteristic(&self, c: usize) -> impl Iterator<Item = CharacteristicStep> + '_ {
        let m = self.grid_size();
        (c..self.phi.len()).step_by(m).map(move |s| CharacteristicStep {
            phi: self.phi[s],
            v: self.v[s],
            rhs: self.rhs[s],
        })
    }

    /// Samples and schedule for [`KickHistory::record`] up to `T`.
    pub fn trajectory(&self, horizon: f64) -> Result<TrajectoryRecord> {
        let last = time_index(horizon, self.grid_size());
        self.check_step(last)?;
        self.record(&sample_steps(self.grid_size(), last, DEFAULT_INTRA_SAMPLES))
    }
}

impl KickHistory for SlidingSignal {
    fn initial(&self) -> &CircleGrid {
        &self.initial
    }

    fn steps(&self) -> usize {
        self.phi.len()
    }

    fn before_kick(&self, step: usize) -> f64 {
        self.rhs[step]
    }

    fn kick(&self, step: usize) -> f64 {
        -self.v[step]
    }
}

/// Grid points handled per parallel task.
const PARALLEL_CHUNK: usize = 1024;

/// Solves the closed-loop motion from `g(·, 0) = G` over `[0, T]`.
///
/// The trace is computed for whole periods, enough to contain the time
/// step nearest to `T`.
pub fn solve_phi(initial: &CircleGrid, horizon: f64) -> Result<SlidingSignal> {
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::NegativeHorizon(horizon));
    }
    let m = initial.len();
    let periods = time_index(horizon, m) / m + 1;
    let len = periods * m;

    let mut phi = vec![0.0; len];
    let mut v = vec![0.0; len];
    let mut rhs = vec![0.0; len];

    // characteristics are independent; each task owns a block of them
    let blocks: Vec<(usize, Vec<CharacteristicStep>)> = (0..m)
        .into_par_iter()
        .step_by(PARALLEL_CHUNK)
        .map(|start| {
            let end = (start + PARALLEL_CHUNK).min(m);
            let mut out = Vec::with_capacity((end - start) * periods);
            for c in start..end {
                let mut step = CharacteristicStep::from_rhs(initial.values()[c]);
                out.push(step);
                for _ in 1..periods {
                    step = step.next();
                    out.push(step);
                }
            }
            (start, out)
        })
        .collect();

    for (start, out) in blocks {
        for (i, step) in out.into_iter().enumerate() {
            let c = start + i / periods;
            let p = i % periods;
            let s = c + p * m;
            phi[s] = step.phi;
            v[s] = step.v;
            rhs[s] = step.rhs;
        }
    }

    Ok(SlidingSignal {
        initial: initial.clone(),
        periods,
        phi,
        v,
        rhs,
    })
}

/// `g(z, t)` under the dry-friction feedback, with the half-kick
/// convention at the load point so that `field_at(0, t) = φ(t)`.
pub fn field_at(signal: &SlidingSignal, z: f64, t: f64) -> Result<f64> {
    signal.field_at(z, t, crate::trajectory::LoadPoint::Midpoint)
}

/// Closed-loop ρ record over `[0, T]` on the default sampling schedule.
pub fn trajectory_rho(initial: &CircleGrid, horizon: f64) -> Result<TrajectoryRecord> {
    solve_phi(initial, horizon)?.trajectory(horizon)
}
