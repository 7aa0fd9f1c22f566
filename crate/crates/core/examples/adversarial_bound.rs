//! Seeded adversarial controls against the dry-friction decay rate.

use string_damping::control_sim::{adversaries, bound_check, replay, RateEnvelope};
use string_damping::even_field::{rho, to_traveling_wave, Problem};
use string_damping::experiment::gen_initial;
use string_damping::friction_solver::solve_phi;

fn main() {
    let g = to_traveling_wave(&gen_initial(3, 15.0, 1.0, 16), 1024).unwrap();
    let rho0 = rho(&g, Problem::StopMoving);
    let horizon = rho0 / 2.0;
    let controls = adversaries(&g, horizon, 200, 42).unwrap();
    let report = bound_check(&g, &controls, horizon, RateEnvelope::DEFAULT).unwrap();
    let dry = replay(&solve_phi(&g, horizon).unwrap(), horizon)
        .unwrap()
        .decay(Problem::StopMoving);
    println!("rho0 = {rho0:.3}, T = {horizon:.3}");
    println!("dry friction rate   = {:.6}", dry.rate);
    println!("best adversary rate = {:.6}", report.max_rate);
    println!("violations          = {}", report.violations.len());
}
