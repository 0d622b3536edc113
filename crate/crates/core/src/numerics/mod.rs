//! Dense complex kernels for the small (N ≤ 64) effective matrices.

pub mod eigen;
pub mod expm;
pub mod lu;
mod matrix;
pub mod permanent;
pub mod svd;

pub use eigen::{eigvals, symmetric_tridiagonal_eigen, Spectrum, TridiagonalEigen};
pub use expm::{expm, expm_with_cap};
pub use lu::{determinant, solve};
pub use matrix::{inner, vec_norm, ComplexMatrix};
pub use permanent::{permanent, MAX_PERMANENT_DIM};
pub use svd::{jacobi_svd, largest_singular, largest_singular_from, rank, singular_values, TopSingular};
