//! Average decay rate on seeded random profiles, and how it approaches 1
//! when ρ(0) and T are doubled together.

use string_damping::even_field::{rho, to_traveling_wave, Problem};
use string_damping::experiment::gen_initial;
use string_damping::friction_solver::solve_phi;

fn rate(amplitude: f64, seed: u64, m: usize) -> (f64, f64) {
    let g = to_traveling_wave(&gen_initial(seed, amplitude, 1.0, 16), m).unwrap();
    let rho0 = rho(&g, Problem::StopMoving);
    let horizon = rho0 / 2.0;
    let d = solve_phi(&g, horizon)
        .unwrap()
        .trajectory(horizon)
        .unwrap()
        .decay(Problem::StopMoving);
    (rho0, d.rate)
}

fn main() {
    let m = 2048;
    for seed in 1..=5 {
        for amplitude in [5.0, 10.0, 20.0, 40.0] {
            let (rho0, r) = rate(amplitude, seed, m);
            println!("seed {seed} amplitude {amplitude:>4}: rho0 = {rho0:>9.2}  rate = {r:.6}");
        }
    }
}
