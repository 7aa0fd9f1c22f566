//! Replays the dry-friction control as an open-loop signal and checks that
//! the two histories agree everywhere.

use std::f64::consts::TAU;

use string_damping::control_sim::{replay, simulate_open_loop, PiecewiseControl};
use string_damping::even_field::{to_traveling_wave, Problem};
use string_damping::experiment::gen_initial;
use string_damping::friction_solver::solve_phi;
use string_damping::trajectory::{KickHistory, LoadPoint};

fn main() {
    let g = to_traveling_wave(&gen_initial(8, 4.0, 1.0, 12), 512).unwrap();
    let horizon = 5.0 * TAU;
    let sig = solve_phi(&g, horizon).unwrap();
    let open = replay(&sig, horizon).unwrap();
    let mut worst = 0.0f64;
    for step in 0..open.steps() {
        let a = sig.profile(step, LoadPoint::Midpoint).unwrap();
        let b = open.profile(step, LoadPoint::Midpoint).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    println!("max |closed - open| = {worst:e}");

    let idle = PiecewiseControl::constant(0.0, horizon).unwrap();
    let rec = simulate_open_loop(&g, &idle, horizon).unwrap();
    let free = rec.rho(Problem::StopMoving);
    println!("uncontrolled rho: {:.4} -> {:.4}", free[0], free[free.len() - 1]);
    let d = open.decay(Problem::StopMoving);
    println!("dry friction rho: {:.4} -> {:.4}", d.rho0, d.rho_t);
}
