//! Support functions of the reachable set and of its time average.

use std::f64::consts::TAU;

use string_damping::support_geometry::{support_d, support_omega, Momentum};

fn main() {
    let xi = Momentum::from_pairs(&[(1, 0.8), (3, -0.4)], &[(0, 0.3), (2, 1.0)]).unwrap();
    let omega = support_omega(&xi).unwrap();
    println!("H_Omega = {omega:.12}");
    for t in [1.0, TAU, 2.0 * TAU, 5.0 * TAU, 37.0, 100.0] {
        let d = support_d(&xi, t).unwrap();
        println!("T = {t:>8.4}  H_D(T) = {d:>14.10}  H_D(T)/T - H_Omega = {:+.3e}", d / t - omega);
    }
}
