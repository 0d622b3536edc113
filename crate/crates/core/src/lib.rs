//! Multilevel quantum decay of discrete states into one-dimensional continua.
//!
//! The crate builds effective non-Hermitian Hamiltonians for levels side-coupled to
//! chiral (unidirectional) and time-reversal-symmetric (bidirectional) baths,
//! propagates them, and checks the reduction against exact lattice simulations.
//! Every kernel is generic over the real scalar (`f32` or `f64`); the aliases at
//! the bottom of this file fix the common double-precision instantiation.

pub mod baths;
pub mod dynamics;
pub mod error;
pub mod manybody;
pub mod model;
pub mod numerics;
pub mod scalar;

pub use error::{Error, Result};
pub use numerics::ComplexMatrix;
pub use scalar::{Cx, Real};

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type EffectiveHamiltonian64 = model::EffectiveHamiltonian<f64>;
pub type EffectiveHamiltonian32 = model::EffectiveHamiltonian<f32>;
pub type LevelChain64 = model::LevelChain<f64>;
pub type Dispersion64 = model::Dispersion<f64>;
pub type DecayTrace64 = dynamics::DecayTrace<f64>;
pub type ExactTrace64 = baths::ExactTrace<f64>;
