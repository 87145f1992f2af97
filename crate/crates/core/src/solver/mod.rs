//! Time evolution of `∂_t g + v∂_x g + 𝒦g = Γ(g, g)` in Hermite × Fourier
//! coefficients, the Picard scheme, and the generalized Kolmogorov oracle.

mod kolmogorov;
mod operators;
mod picard;
mod state;
mod stepper;

pub use kolmogorov::{damping_exponent, kolmogorov_evolve};
pub use operators::{apply_collision, apply_transport, CollisionMode, GammaOutput, Nonlinear, TransportPropagator};
pub use picard::{bisect_largest, energy_functional, picard_solve, seed_iterate, PicardOptions, PicardReport};
pub use state::{InitialData, ModeSpec, SpectralState};
pub use stepper::{Forcing, Run, SchemeKind, Solver, StepScheme};
