//! Exact simulation of a closed string brought to rest by a bounded point
//! load under dry-friction feedback `u = -sign f_t(0)`, together with the
//! reachable-set geometry that makes this feedback asymptotically
//! time-optimal.
//!
//! * [`even_field`]: even states, the traveling-wave variable
//!   `g = ∂f0/∂x + f1` and the ρ-functional.
//! * [`support_geometry`]: momenta, support functions of reachable sets,
//!   the steepest-descent state and the feedback law.
//! * [`friction_solver`]: the closed-loop motion, solved exactly by a
//!   per-period scalar inclusion along characteristics.
//! * [`galerkin_oracle`]: an independent cosine-truncation integrator.
//! * [`control_sim`]: open-loop motion under arbitrary admissible
//!   controls and the decay-rate bound check.
//! * [`experiment`]: configuration, CSV output and the command line.

pub mod control_sim;
pub mod error;
pub mod even_field;
pub mod experiment;
pub mod friction_solver;
pub mod galerkin_oracle;
pub mod support_geometry;
pub mod trajectory;

pub use error::{Error, Result};
pub use even_field::{CircleGrid, EvenFourier, GridState, Problem, StatePair};
pub use friction_solver::SlidingSignal;
pub use support_geometry::Momentum;
pub use trajectory::{KickHistory, LoadPoint, TrajectoryRecord};
