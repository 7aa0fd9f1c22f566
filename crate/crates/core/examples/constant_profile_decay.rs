//! Dry friction on `g ≡ 50`: ρ_stop falls by exactly 2π per period.

use std::f64::consts::{PI, TAU};

use string_damping::even_field::{CircleGrid, Problem};
use string_damping::friction_solver::solve_phi;

fn main() {
    let g = CircleGrid::constant(1024, 50.0).unwrap();
    let horizon = 80.0 * PI;
    let rec = solve_phi(&g, horizon).unwrap().trajectory(horizon).unwrap();
    for (t, r) in rec.times.iter().zip(&rec.rho_stop) {
        // period boundaries only
        if (t / TAU - (t / TAU).round()).abs() < 1e-9 {
            println!("t = {:>6.2}  rho_stop = {r:.6}", t);
        }
    }
    let d = rec.decay(Problem::StopMoving);
    println!("rate = {}", d.rate);
}
