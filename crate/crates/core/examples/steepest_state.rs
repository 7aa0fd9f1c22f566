//! The state attaining the support value in direction ξ, and the feedback
//! it induces at the load point.

use string_damping::galerkin_oracle::project_grid_state;
use string_damping::support_geometry::{
    dry_friction_control, pairing, steepest_state, support_omega, zeta, Momentum,
};

fn main() {
    let xi = Momentum::from_pairs(&[(1, 1.0)], &[(0, 0.2), (1, 0.5)]).unwrap();
    let horizon = 6.0;
    let state = steepest_state(&xi, horizon, 4096).unwrap();
    let modes = project_grid_state(&state, xi.degree());
    println!("<xi, f>       = {:.6}", pairing(&xi, &modes.q, &modes.p));
    println!("T * H_Omega   = {:.6}", horizon * support_omega(&xi).unwrap());
    println!("zeta(0)       = {:+.4}", zeta(&xi, 0.0));
    println!("control at f  = {:+}", dry_friction_control(&state.traveling_wave()));
}
