//! Open-loop motion under arbitrary admissible controls `|u| ≤ 1`.
//!
//! `g(z, t) = G(z + t) + Σ u(t_k)` over the times `t_k` at which the
//! characteristic through `(z, t)` crossed the load point. Used to test
//! that no admissible control decays ρ faster than the dry-friction law.

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::even_field::{CircleGrid, Problem};
use crate::friction_solver::SlidingSignal;
use crate::trajectory::{sample_steps, time_index, KickHistory, TrajectoryRecord, DEFAULT_INTRA_SAMPLES};

/// Control that is constant on `[breakpoints[i], breakpoints[i+1])`,
/// with the last value holding up to `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseControl {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    end: f64,
}

impl PiecewiseControl {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, end: f64) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidControl(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidControl(format!(
                "first breakpoint is {}, expected 0",
                breakpoints[0]
            )));
        }
        if let Some(i) = breakpoints.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidControl(format!(
                "breakpoints not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= 1.0))
        {
            return Err(Error::InvalidControl(format!(
                "value {v} at index {i} violates |u| <= 1"
            )));
        }
        let last = *breakpoints.last().unwrap();
        if !(end >= last) {
            return Err(Error::InvalidControl(format!(
                "end {end} precedes the last breakpoint {last}"
            )));
        }
        Ok(Self {
            breakpoints,
            values,
            end,
        })
    }

    /// `u ≡ value` on `[0, end]`.
    pub fn constant(value: f64, end: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![value], end)
    }

    /// One value per grid time step of width `h`: sample `i` holds on
    /// `[i h, (i+1) h)`.
    pub fn from_steps(values: &[f64], h: f64) -> Result<Self> {
        let breakpoints = (0..values.len()).map(|i| i as f64 * h).collect();
        Self::new(breakpoints, values.to_vec(), values.len() as f64 * h)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// `u(t)` for `t` in `[0, end]`.
    pub fn at(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        self.values[i.saturating_sub(1)]
    }
}

/// Open-loop response, stored as the control sampled at every grid time
/// step together with the per-characteristic running sums.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenLoopResponse {
    initial: CircleGrid,
    u: Vec<f64>,
    // cumulative[σ] = u[σ] + u[σ − m] + u[σ − 2m] + …
    cumulative: Vec<f64>,
}

impl OpenLoopResponse {
    pub fn new(initial: &CircleGrid, control: &PiecewiseControl, horizon: f64) -> Result<Self> {
        if horizon.is_nan() || horizon < 0.0 {
            return Err(Error::NegativeHorizon(horizon));
        }
        if control.end() < horizon {
            return Err(Error::ControlTooShort {
                end: control.end(),
                horizon,
            });
        }
        let m = initial.len();
        let h = initial.spacing();
        let last = time_index(horizon, m);
        let u: Vec<f64> = (0..=last)
            .map(|s| control.at(s as f64 * h))
            .collect();
        Ok(Self::from_samples(initial, u))
    }

    /// Response to control samples given directly at grid time steps.
    pub fn from_samples(initial: &CircleGrid, u: Vec<f64>) -> Self {
        let m = initial.len();
        let mut cumulative = u.clone();
        for s in m..cumulative.len() {
            cumulative[s] += cumulative[s - m];
        }
        Self {
            initial: initial.clone(),
            u,
            cumulative,
        }
    }

    pub fn control_samples(&self) -> &[f64] {
        &self.u
    }

    /// ρ record over `[0, T]` on the default sampling schedule.
    pub fn trajectory(&self) -> Result<TrajectoryRecord> {
        let last = self.steps().saturating_sub(1);
        self.record(&sample_steps(self.grid_size(), last, DEFAULT_INTRA_SAMPLES))
    }

    /// `(ρ(0) − ρ(T))/T` from the two end profiles only.
    pub fn decay(&self, problem: Problem) -> crate::trajectory::DecaySummary {
        let last = self.steps().saturating_sub(1);
        let steps = if last == 0 { vec![0] } else { vec![0, last] };
        self.record(&steps)
            .expect("steps within horizon")
            .decay(problem)
    }
}

impl KickHistory for OpenLoopResponse {
    fn initial(&self) -> &CircleGrid {
        &self.initial
    }

    fn steps(&self) -> usize {
        self.u.len()
    }

    fn before_kick(&self, step: usize) -> f64 {
        let m = self.initial.len();
        let prior = if step >= m { self.cumulative[step - m] } else { 0.0 };
        self.initial.values()[step % m] + prior
    }

    fn kick(&self, step: usize) -> f64 {
        self.u[step]
    }
}

/// Simulates `u` from `g(·, 0) = G` over `[0, T]` and returns the ρ record.
pub fn simulate_open_loop(
    initial: &CircleGrid,
    control: &PiecewiseControl,
    horizon: f64,
) -> Result<TrajectoryRecord> {
    OpenLoopResponse::new(initial, control, horizon)?.trajectory()
}

/// Replays the control realized by the dry-friction solver as an open-loop
/// control.
pub fn replay(signal: &SlidingSignal, horizon: f64) -> Result<OpenLoopResponse> {
    let last = time_index(horizon, signal.grid_size());
    signal.check_step(last)?;
    let u = signal.control()[..=last].to_vec();
    Ok(OpenLoopResponse::from_samples(signal.initial(), u))
}

/// Envelope `1 + per_time/T + per_level/M` for decay rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEnvelope {
    pub per_time: f64,
    pub per_level: f64,
}

impl RateEnvelope {
    /// Each characteristic is kicked at most once per period by at most 1,
    /// so `ρ_stop` cannot fall by more than `T + 2π` over `[0, T]`; the
    /// level term covers the half-kick band at the load point.
    pub const DEFAULT: RateEnvelope = RateEnvelope {
        per_time: TAU,
        per_level: TAU,
    };

    pub fn tolerance(&self, horizon: f64, level: f64) -> f64 {
        let time_term = if horizon > 0.0 { self.per_time / horizon } else { f64::INFINITY };
        let level_term = if level > 0.0 { self.per_level / level } else { f64::INFINITY };
        time_term + level_term
    }

    pub fn bound(&self, horizon: f64, level: f64) -> f64 {
        1.0 + self.tolerance(horizon, level)
    }
}

impl Default for RateEnvelope {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Outcome of [`bound_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rates: Vec<f64>,
    /// `M = min(ρ(0), ρ(T))` per control.
    pub levels: Vec<f64>,
    pub max_rate: f64,
    pub horizon: f64,
    /// Indices of controls whose rate exceeded `1 + tol(T, M)`.
    pub violations: Vec<usize>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Decay rate of `ρ_stop` for each control, checked against the envelope.
pub fn bound_check(
    initial: &CircleGrid,
    controls: &[PiecewiseControl],
    horizon: f64,
    envelope: RateEnvelope,
) -> Result<BoundReport> {
    let summaries = controls
        .par_iter()
        .map(|c| Ok(OpenLoopResponse::new(initial, c, horizon)?.decay(Problem::StopMoving)))
        .collect::<Result<Vec<_>>>()?;
    let horizon = summaries.first().map_or(horizon, |s| s.horizon);
    let rates: Vec<f64> = summaries.iter().map(|s| s.rate).collect();
    let levels: Vec<f64> = summaries.iter().map(|s| s.level()).collect();
    let violations = summaries
        .iter()
        .enumerate()
        .filter(|(_, s)| s.rate > envelope.bound(s.horizon, s.level()))
        .map(|(i, _)| i)
        .collect();
    Ok(BoundReport {
        max_rate: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        rates,
        levels,
        horizon,
        violations,
    })
}

/// Bang-bang control with exponentially distributed switching times.
pub fn random_bang_bang(seed: u64, mean_dwell: f64, end: f64) -> Result<PiecewiseControl> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dwell = Exp::new(1.0 / mean_dwell)
        .map_err(|e| Error::InvalidControl(format!("mean dwell {mean_dwell}: {e}")))?;
    let mut value: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let mut breakpoints = vec![0.0];
    let mut values = vec![value];
    let mut t = 0.0;
    loop {
        t += dwell.sample(&mut rng);
        if t >= end {
            break;
        }
        value = -value;
        breakpoints.push(t);
        values.push(value);
    }
    PiecewiseControl::new(breakpoints, values, end)
}

/// Greedy control that pushes against the sign of the current largest
/// `|g|`, re-decided every `block` grid steps.
pub fn greedy_sup_chasing(initial: &CircleGrid, horizon: f64, block: usize) -> Result<PiecewiseControl> {
    let m = initial.len();
    let last = time_index(horizon, m);
    let block = block.max(1);
    // running value of each characteristic, before its next kick
    let mut value = initial.values().to_vec();
    let mut u = Vec::with_capacity(last + 1);
    let mut current = 0.0;
    for s in 0..=last {
        if s % block == 0 {
            let (_, &top) = value
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("non-empty grid");
            current = -crate::support_geometry::sign0(top);
        }
        u.push(current);
        value[s % m] += current;
    }
    PiecewiseControl::from_steps(&u, initial.spacing())
}

/// A mixed family of `count` seeded adversaries for [`bound_check`]:
/// constant levels, greedy sup-chasers and random bang-bang controls.
pub fn adversaries(initial: &CircleGrid, horizon: f64, count: usize, seed: u64) -> Result<Vec<PiecewiseControl>> {
    let m = initial.len();
    let end = horizon;
    (0..count)
        .map(|i| match i % 10 {
            0 => {
                let level = -1.0 + 2.0 * ((i / 10) % 11) as f64 / 10.0;
                PiecewiseControl::constant(level, end)
            }
            1 => greedy_sup_chasing(initial, horizon, (m / 64).max(1) << (i / 10 % 4)),
            k => {
                // mean dwell from a tenth of a period up to several periods
                let mean = TAU * 0.1 * (1.5f64).powi(k as i32 + (i / 10) as i32 % 3);
                random_bang_bang(seed.wrapping_add(i as u64), mean, end)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::even_field::rho;
    use crate::friction_solver::solve_phi;
    use crate::trajectory::LoadPoint;

    #[test]
    fn control_validation() {
        assert!(PiecewiseControl::new(vec![0.0, 1.0], vec![0.5, -1.0], 2.0).is_ok());
        assert!(matches!(
            PiecewiseControl::new(vec![0.0, 1.0], vec![0.5, 1.5], 2.0),
            Err(Error::InvalidControl(msg)) if msg.contains("|u| <= 1")
        ));
        assert!(PiecewiseControl::new(vec![0.1], vec![0.0], 2.0).is_err());
        assert!(PiecewiseControl::new(vec![0.0, 1.0, 1.0], vec![0.0; 3], 2.0).is_err());
        assert!(PiecewiseControl::new(vec![0.0, 3.0], vec![0.0; 2], 2.0).is_err());
        assert!(PiecewiseControl::new(vec![], vec![], 2.0).is_err());
    }

    #[test]
    fn control_lookup_is_left_continuous_at_breakpoints() {
        let c = PiecewiseControl::new(vec![0.0, 1.0, 2.0], vec![1.0, -1.0, 0.25], 3.0).unwrap();
        assert_eq!(c.at(0.0), 1.0);
        assert_eq!(c.at(0.999), 1.0);
        assert_eq!(c.at(1.0), -1.0);
        assert_eq!(c.at(2.5), 0.25);
        assert_eq!(c.at(3.0), 0.25);
    }

    #[test]
    fn short_control_is_rejected() {
        let g = CircleGrid::constant(8, 1.0).unwrap();
        let u = PiecewiseControl::constant(0.0, 1.0).unwrap();
        assert_eq!(
            simulate_open_loop(&g, &u, 2.0),
            Err(Error::ControlTooShort {
                end: 1.0,
                horizon: 2.0
            })
        );
    }

    #[test]
    fn free_transport_preserves_rho() {
        let g = CircleGrid::from_fn(64, |x| 3.0 * x.cos() + (2.0 * x).sin()).unwrap();
        let u = PiecewiseControl::constant(0.0, 5.0 * TAU).unwrap();
        let rec = simulate_open_loop(&g, &u, 5.0 * TAU).unwrap();
        let r0 = rho(&g, Problem::StopMoving);
        assert!(rec.rho_stop.iter().all(|&r| r == r0));
    }

    #[test]
    fn full_braking_on_constant_profile() {
        let m = 32;
        let g = CircleGrid::constant(m, 10.0).unwrap();
        let u = PiecewiseControl::constant(-1.0, 6.0 * TAU).unwrap();
        let resp = OpenLoopResponse::new(&g, &u, 6.0 * TAU).unwrap();
        for k in 0..=6 {
            let prof = resp.profile(k * m, LoadPoint::BeforeKick).unwrap();
            assert!(prof.values().iter().all(|&v| v == 10.0 - k as f64));
        }
        let d = resp.decay(Problem::StopMoving);
        assert!((d.rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn replayed_dry_friction_matches_closed_loop() {
        let m = 64;
        let g = CircleGrid::from_fn(m, |x| 4.3 * x.cos() - 1.1 * (3.0 * x).sin()).unwrap();
        let horizon = 6.0 * TAU + 0.7;
        let sig = solve_phi(&g, horizon).unwrap();
        let open = replay(&sig, horizon).unwrap();
        let last = open.steps() - 1;
        for step in (0..=last).step_by(7) {
            for lp in [LoadPoint::BeforeKick, LoadPoint::Midpoint, LoadPoint::AfterKick] {
                let a = sig.profile(step, lp).unwrap();
                let b = open.profile(step, lp).unwrap();
                for (x, y) in a.values().iter().zip(b.values()) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn piecewise_replay_agrees_with_sample_replay() {
        let m = 16;
        let g = CircleGrid::from_fn(m, |x| 2.5 * x.cos()).unwrap();
        let sig = solve_phi(&g, 3.0 * TAU).unwrap();
        let last = time_index(3.0 * TAU, m);
        let pc = PiecewiseControl::from_steps(&sig.control()[..=last], g.spacing()).unwrap();
        let a = OpenLoopResponse::new(&g, &pc, 3.0 * TAU).unwrap();
        let b = replay(&sig, 3.0 * TAU).unwrap();
        assert_eq!(a.control_samples(), b.control_samples());
    }

    #[test]
    fn bound_check_zero_control() {
        let g = CircleGrid::constant(16, 20.0).unwrap();
        let c = vec![PiecewiseControl::constant(0.0, 4.0 * TAU).unwrap()];
        let rep = bound_check(&g, &c, 4.0 * TAU, RateEnvelope::DEFAULT).unwrap();
        assert_eq!(rep.rates, vec![0.0]);
        assert!(rep.holds());
    }

    #[test]
    fn adversaries_are_admissible_and_deterministic() {
        let g = CircleGrid::from_fn(64, |x| 20.0 * x.cos()).unwrap();
        let a = adversaries(&g, 10.0 * TAU, 30, 9).unwrap();
        let b = adversaries(&g, 10.0 * TAU, 30, 9).unwrap();
        assert_eq!(a, b);
        for c in &a {
            assert!(c.values().iter().all(|v| v.abs() <= 1.0));
            assert!(c.end() >= 10.0 * TAU);
        }
    }

    #[test]
    fn exponential_dwell_rejects_bad_mean() {
        assert!(random_bang_bang(1, -1.0, 5.0).is_err());
    }
}
