//! Finite cosine truncation of the controlled string, used as an
//! independent check on the exact solver.
//!
//! Mode `n` of the displacement obeys `q̈_n = −n² q_n + u·b_n`, where `b_n`
//! are the cosine coefficients of the point load `δ(x)`. The feedback is a
//! saturated version of `−sign f_t(0)`, with `f_t(0) = Σ p_n`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::even_field::{GridState, StatePair};

/// Cosine coefficient of `δ(x) = 1/(2π) + (1/π) Σ cos(n x)`.
pub fn delta_coefficient(n: usize) -> f64 {
    if n == 0 {
        1.0 / TAU
    } else {
        1.0 / PI
    }
}

/// `L²` weight of the `n`-th cosine mode: `∫ cos² (n x) dx`.
fn l2_weight(n: usize) -> f64 {
    if n == 0 {
        TAU
    } else {
        PI
    }
}

/// Displacement and velocity cosine coefficients `q_0..q_N`, `p_0..p_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl ModalState {
    pub fn zeros(order: usize) -> Self {
        Self {
            q: vec![0.0; order + 1],
            p: vec![0.0; order + 1],
        }
    }

    /// Highest mode index `N`.
    pub fn order(&self) -> usize {
        self.q.len() - 1
    }

    /// Velocity at the load point, `f_t(0) = Σ p_n`.
    pub fn load_point_velocity(&self) -> f64 {
        self.p.iter().sum()
    }

    /// `½ ∫ (f_t² + f_x²) dx = ½ Σ w_n (p_n² + n² q_n²)`.
    pub fn energy(&self) -> f64 {
        self.q
            .iter()
            .zip(&self.p)
            .enumerate()
            .map(|(n, (q, p))| {
                let n2 = (n * n) as f64;
                0.5 * l2_weight(n) * (p * p + n2 * q * q)
            })
            .sum()
    }

    fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }

    fn axpy(&self, a: f64, d: &ModalState) -> ModalState {
        ModalState {
            q: self.q.iter().zip(&d.q).map(|(x, y)| x + a * y).collect(),
            p: self.p.iter().zip(&d.p).map(|(x, y)| x + a * y).collect(),
        }
    }
}

/// Time derivative of the modal state under the control `u`.
pub fn modal_rhs(state: &ModalState, u: f64) -> ModalState {
    let q = state.p.clone();
    let p = state
        .q
        .iter()
        .enumerate()
        .map(|(n, qn)| -((n * n) as f64) * qn + u * delta_coefficient(n))
        .collect();
    ModalState { q, p }
}

/// `sat(x) = clamp(x, −1, 1)`.
pub fn saturate(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Regularized dry friction `u = −sat(f_t(0) / eps)`.
pub fn regularized_feedback(state: &ModalState, eps: f64) -> f64 {
    -saturate(state.load_point_velocity() / eps)
}

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    pub dt: f64,
    pub eps: f64,
    /// Keep every `record_every`-th step in the output.
    pub record_every: usize,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            eps: 1e-3,
            record_every: 1,
        }
    }
}

/// Sampled closed-loop modal trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModalTrajectory {
    pub times: Vec<f64>,
    /// `f_t(0, t)`.
    pub load_point_velocity: Vec<f64>,
    pub control: Vec<f64>,
    pub energy: Vec<f64>,
    pub final_state: Option<ModalState>,
}

/// Classical fourth-order Runge–Kutta over `[0, T]` with the feedback
/// re-evaluated at every stage.
pub fn integrate_feedback(
    initial: &ModalState,
    horizon: f64,
    params: OracleParams,
) -> Result<ModalTrajectory> {
    if !(params.dt > 0.0) {
        return Err(Error::InvalidOracleParameter(format!("dt = {}", params.dt)));
    }
    if !(params.eps > 0.0) {
        return Err(Error::InvalidOracleParameter(format!("eps = {}", params.eps)));
    }
    if initial.order() < 1 {
        return Err(Error::InvalidOracleParameter("N must be at least 1".into()));
    }
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::NegativeHorizon(horizon));
    }
    let every = params.record_every.max(1);
    let steps = (horizon / params.dt).round() as usize;
    let dt = params.dt;
    let eps = params.eps;
    let field = |s: &ModalState| modal_rhs(s, regularized_feedback(s, eps));

    let mut out = ModalTrajectory::default();
    let push = |out: &mut ModalTrajectory, t: f64, s: &ModalState| {
        out.times.push(t);
        out.load_point_velocity.push(s.load_point_velocity());
        out.control.push(regularized_feedback(s, eps));
        out.energy.push(s.energy());
    };

    let mut state = initial.clone();
    push(&mut out, 0.0, &state);
    for step in 1..=steps {
        let k1 = field(&state);
        let k2 = field(&state.axpy(0.5 * dt, &k1));
        let k3 = field(&state.axpy(0.5 * dt, &k2));
        let k4 = field(&state.axpy(dt, &k3));
        state = ModalState {
            q: (0..state.q.len())
                .map(|n| state.q[n] + dt / 6.0 * (k1.q[n] + 2.0 * k2.q[n] + 2.0 * k3.q[n] + k4.q[n]))
                .collect(),
            p: (0..state.p.len())
                .map(|n| state.p[n] + dt / 6.0 * (k1.p[n] + 2.0 * k2.p[n] + 2.0 * k3.p[n] + k4.p[n]))
                .collect(),
        };
        let t = step as f64 * dt;
        if !state.is_finite() {
            return Err(Error::BlowUp { t, step });
        }
        if step % every == 0 || step == steps {
            push(&mut out, t, &state);
        }
    }
    out.final_state = Some(state);
    Ok(out)
}

/// Truncates a cosine-series state to modes `0..=N`.
pub fn project_state(f: &StatePair, order: usize) -> ModalState {
    ModalState {
        q: (0..=order).map(|n| f.f0.coeff(n)).collect(),
        p: (0..=order).map(|n| f.f1.coeff(n)).collect(),
    }
}

/// Discrete cosine analysis of a sampled state, modes `0..=N`.
///
/// Exact for band-limited samples with `N < m/2`; otherwise the result is
/// the least-squares fit on the grid.
pub fn project_grid_state(f: &GridState, order: usize) -> ModalState {
    ModalState {
        q: cosine_coefficients(f.f0.values(), order),
        p: cosine_coefficients(f.f1.values(), order),
    }
}

fn cosine_coefficients(samples: &[f64], order: usize) -> Vec<f64> {
    let m = samples.len();
    let h = TAU / m as f64;
    (0..=order)
        .map(|n| {
            if 2 * n > m {
                return 0.0;
            }
            let dot: f64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * ((n * j) as f64 * h).cos())
                .sum();
            // the Nyquist mode is sampled like the mean
            if n == 0 || 2 * n == m {
                dot / m as f64
            } else {
                2.0 * dot / m as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::even_field::{CircleGrid, EvenFourier};

    #[test]
    fn rhs_examples() {
        let zero = ModalState::zeros(4);
        let d = modal_rhs(&zero, 0.0);
        assert!(d.q.iter().chain(&d.p).all(|&x| x == 0.0));

        let d = modal_rhs(&zero, 1.0);
        assert_eq!(d.p[0], 1.0 / TAU);
        assert!(d.p[1..].iter().all(|&x| x == 1.0 / PI));

        let mut s = ModalState::zeros(4);
        s.q[1] = 1.0;
        let d = modal_rhs(&s, 0.0);
        assert_eq!(d.p[1], -1.0);
        assert!(d.q.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn delta_coefficients_reproduce_point_evaluation() {
        // ∫ δ(x) cos(kx) dx = 1 for every k
        for k in 0..10 {
            let w = if k == 0 { TAU } else { PI };
            assert!((w * delta_coefficient(k) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rest_stays_at_rest() {
        let traj = integrate_feedback(&ModalState::zeros(8), 0.1, OracleParams::default()).unwrap();
        assert!(traj.load_point_velocity.iter().all(|&v| v == 0.0));
        assert!(traj.final_state.unwrap().p.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_step_under_full_braking() {
        // uniform velocity c ⇒ f_t(0) = c ≫ eps, so u = −1 on every stage
        let mut s = ModalState::zeros(3);
        s.p[0] = 2.0;
        let dt = 1e-3;
        let traj = integrate_feedback(
            &s,
            dt,
            OracleParams {
                dt,
                eps: 1e-3,
                record_every: 1,
            },
        )
        .unwrap();
        let sum_b: f64 = (0..=3).map(delta_coefficient).sum();
        // q_n stays O(dt²), so d/dt Σp = −Σ b_n up to O(dt³)
        let after = traj.load_point_velocity[1];
        assert!((after - (2.0 - sum_b * dt)).abs() < 1e-8);
    }

    #[test]
    fn free_flow_conserves_energy() {
        let mut s = ModalState::zeros(16);
        for n in 0..=16 {
            s.q[n] = 1.0 / (1.0 + n as f64);
            s.p[n] = 0.5 / (1.0 + (n * n) as f64);
        }
        let e0 = s.energy();
        // with u ≡ 0 the feedback is bypassed by integrating the free rhs
        let dt = 1e-3;
        let mut state = s;
        for _ in 0..2000 {
            let k1 = modal_rhs(&state, 0.0);
            let k2 = modal_rhs(&state.axpy(0.5 * dt, &k1), 0.0);
            let k3 = modal_rhs(&state.axpy(0.5 * dt, &k2), 0.0);
            let k4 = modal_rhs(&state.axpy(dt, &k3), 0.0);
            state = state
                .axpy(dt / 6.0, &k1)
                .axpy(dt / 3.0, &k2)
                .axpy(dt / 3.0, &k3)
                .axpy(dt / 6.0, &k4);
        }
        assert!((state.energy() - e0).abs() < 1e-9 * e0);
    }

    #[test]
    fn feedback_dissipates_energy() {
        let f = StatePair::new(EvenFourier::zero(), EvenFourier::mode(1, 5.0));
        let traj = integrate_feedback(&project_state(&f, 16), 1.0, OracleParams::default()).unwrap();
        for w in traj.energy.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
        assert!(traj.energy.last().unwrap() < &traj.energy[0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = ModalState::zeros(4);
        let bad_dt = OracleParams {
            dt: 0.0,
            ..OracleParams::default()
        };
        assert!(matches!(
            integrate_feedback(&s, 1.0, bad_dt),
            Err(Error::InvalidOracleParameter(_))
        ));
        let bad_eps = OracleParams {
            eps: -1.0,
            ..OracleParams::default()
        };
        assert!(integrate_feedback(&s, 1.0, bad_eps).is_err());
        assert!(integrate_feedback(&ModalState::zeros(0), 1.0, OracleParams::default()).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let mut s = ModalState::zeros(400);
        s.q[400] = 1.0;
        let params = OracleParams {
            dt: 0.5,
            eps: 1e-3,
            record_every: 1,
        };
        assert!(matches!(
            integrate_feedback(&s, 1e4, params),
            Err(Error::BlowUp { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let zero = project_state(&StatePair::default(), 4);
        assert!(zero.q.iter().chain(&zero.p).all(|&x| x == 0.0));

        let f = StatePair::new(EvenFourier::zero(), EvenFourier::mode(1, 1.0));
        let s = project_state(&f, 4);
        assert_eq!(s.p, vec![0.0, 1.0, 0.0, 0.0, 0.0]);

        let m = 16;
        let grid = GridState {
            f0: CircleGrid::zeros(m).unwrap(),
            f1: CircleGrid::from_fn(m, |x| (2.0 * x).cos()).unwrap(),
        };
        let s = project_grid_state(&grid, 5);
        for (n, p) in s.p.iter().enumerate() {
            let expected = if n == 2 { 1.0 } else { 0.0 };
            assert!((p - expected).abs() < 1e-12, "n={n} p={p}");
        }
    }
}
