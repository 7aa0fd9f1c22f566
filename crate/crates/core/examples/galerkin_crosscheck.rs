//! Compares the exact load-point velocity with a truncated modal model
//! under regularized dry friction.

use std::f64::consts::TAU;

use string_damping::even_field::{to_traveling_wave, EvenFourier, StatePair};
use string_damping::friction_solver::solve_phi;
use string_damping::galerkin_oracle::{integrate_feedback, project_state, OracleParams};
use string_damping::trajectory::{time_index, KickHistory, LoadPoint};

fn main() {
    let state = StatePair::new(EvenFourier::zero(), EvenFourier::mode(1, 5.0));
    let m = 1 << 14;
    let sig = solve_phi(&to_traveling_wave(&state, m).unwrap(), TAU).unwrap();
    for order in [32, 64, 128] {
        let params = OracleParams { record_every: 1000, ..OracleParams::default() };
        let traj = integrate_feedback(&project_state(&state, order), 1.4, params).unwrap();
        println!("N = {order}");
        for (t, v) in traj.times.iter().zip(&traj.load_point_velocity) {
            let phi = sig.value(0, time_index(*t, m), LoadPoint::Midpoint).unwrap();
            println!("  t = {t:.2}  modal = {v:+.4}  exact = {phi:+.4}");
        }
    }
}
