//! Solves `φ + ½v = G, v ∈ sign φ` and follows one characteristic through
//! repeated passes of the load point.

use string_damping::friction_solver::{evolve_characteristic, solve_scalar_inclusion};

fn main() {
    println!("{:>6} {:>8} {:>8}", "G", "phi", "v");
    for g in [-2.0, -0.5, -0.2, 0.0, 0.3, 0.5, 0.7, 3.0] {
        let (phi, v) = solve_scalar_inclusion(g);
        println!("{g:>6.2} {phi:>8.3} {v:>8.3}");
    }

    println!("\npasses of a characteristic starting at G = 3.3");
    for (k, step) in evolve_characteristic(3.3, 6).iter().enumerate() {
        println!("pass {k}: G = {:+.2}  phi = {:+.2}  v = {:+.2}", step.rhs, step.phi, step.v);
    }
}
