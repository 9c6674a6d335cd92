//! Local decoherence generators and time propagation.
//!
//! Each subsystem couples to its own environment through identical jump
//! operators `Lᵢ` with rates `Γᵢ`; the joint generator is `𝟙⊗𝓛 + 𝓛⊗𝟙` with
//! `𝓛ρ = Σᵢ Γᵢ/2 (2LᵢρLᵢ† − Lᵢ†Lᵢρ − ρLᵢ†Lᵢ)`.

mod expm;
mod generator;
mod model;
mod propagate;

pub use expm::expm;
pub use generator::{apply_generator, Generator, SparseOp};
pub use model::{annihilation, local_jump_operators, sigma_minus, Channel, EnvironmentModel, Ladder};
pub use propagate::{
    evolve_trajectory, linear_grid, propagate, Backend, IntegratorConfig, Propagator, Trajectory, INTEGRITY_TOL,
    MAX_SUPEROPERATOR_DIM,
};
