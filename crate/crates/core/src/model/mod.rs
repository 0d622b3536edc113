//! Levels, bath dispersions and the effective non-Hermitian Hamiltonians they induce.

mod chain;
mod dispersion;
mod hamiltonian;
mod markov;

pub use chain::{Level, LevelChain};
pub use dispersion::{wrap_bz, Dispersion, Resonance, TabulatedBranch, MIN_TABULATED_SAMPLES};
pub use hamiltonian::{
    bidirectional_band_center, build_bidirectional, build_unidirectional, find_bound_states, Coupling,
    EffectiveHamiltonian,
};
pub use markov::{delta_closed_form, delta_numeric, QuadratureOptions, MIN_GRID_POINTS, RICHARDSON_LIMIT};
