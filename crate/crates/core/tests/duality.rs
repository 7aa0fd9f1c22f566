use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use string_damping::even_field::EvenFourier;
use string_damping::galerkin_oracle::project_grid_state;
use string_damping::support_geometry::{
    dry_friction_control, pairing, sign0, steepest_state, support_omega, zeta, Momentum,
};

fn random_momentum(rng: &mut ChaCha8Rng, degree: usize) -> Momentum {
    let mut phi: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let psi: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
    phi[0] = 0.0;
    Momentum::new(EvenFourier::new(phi).unwrap(), EvenFourier::new(psi).unwrap())
}

#[test]
fn steepest_state_attains_the_support_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = 8192;
    for _ in 0..25 {
        let degree = rng.gen_range(1..=6);
        let xi = random_momentum(&mut rng, degree);
        let horizon = rng.gen_range(1.0..30.0);
        let state = steepest_state(&xi, horizon, m).unwrap();
        let modes = project_grid_state(&state, degree);
        let value = pairing(&xi, &modes.q, &modes.p);
        let expected = horizon * support_omega(&xi).unwrap();
        // sampling a sign function costs O(1/m)
        assert!(
            (value - expected).abs() <= 2e-3 * expected,
            "pairing {value} vs T·H_Ω {expected}"
        );
    }
}

#[test]
fn no_admissible_state_beats_the_steepest_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = 4096;
    let xi = random_momentum(&mut rng, 4);
    let horizon = 5.0;
    let best = {
        let s = project_grid_state(&steepest_state(&xi, horizon, m).unwrap(), 4);
        pairing(&xi, &s.q, &s.p)
    };
    // steepest states of other momenta lie in the same set
    for _ in 0..50 {
        let other = random_momentum(&mut rng, 4);
        let s = project_grid_state(&steepest_state(&other, horizon, m).unwrap(), 4);
        assert!(pairing(&xi, &s.q, &s.p) <= best * (1.0 + 2e-3));
    }
}

#[test]
fn feedback_at_the_steepest_state_opposes_zeta() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 100 {
        let degree = rng.gen_range(1..=8);
        let xi = random_momentum(&mut rng, degree);
        let z0 = zeta(&xi, 0.0);
        if z0.abs() < 1e-6 {
            continue;
        }
        let horizon = rng.gen_range(0.5..20.0);
        let g = steepest_state(&xi, horizon, 512).unwrap().traveling_wave();
        assert_eq!(dry_friction_control(&g), -sign0(z0));
        checked += 1;
    }
}
