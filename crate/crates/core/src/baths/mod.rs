//! Exact lattice simulations of the three chiral baths, used to check the
//! effective description: a long-range metacrystal chain, the edge of a
//! Harper–Hofstadter strip and an anomalous Floquet lattice.

mod floquet;
mod harper;
mod integrator;
mod metacrystal;

pub use floquet::{
    floquet_cycle_evolve, floquet_effective, FloquetCycle, FloquetEffective, FloquetLattice, FloquetTrace,
    WRAPAROUND_WEIGHT,
};
pub use harper::{
    harper_edge_modes, hofstadter_evolve, zone_grid, EdgeBranch, GapSelector, StripAttachment, StripGeometry,
    BOUNDARY_WEIGHT, BOUNDARY_WINDOW, DEFAULT_STRIP_ROWS, EDGE_DEPTH, EDGE_WEIGHT, TRUNCATION_TOL,
};
pub use integrator::{evolve, halving_error, ExactTrace, Geometry, LatticeState, LinearOperator, Rk4};
pub use metacrystal::{
    metacrystal_dispersion, metacrystal_evolve, metacrystal_hoppings, metacrystal_velocity, MetacrystalHoppings,
    MetacrystalWindow, MIN_RANGE,
};
