use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level frequency {omega} lies outside the band [{lo}, {hi}]")]
    OutOfBand { omega: f64, lo: f64, hi: f64 },
    #[error("dispersion is not monotone: resonance at {omega} is not unique")]
    MultipleRoots { omega: f64 },
    #[error("dispersion is not chiral (group velocity must be positive everywhere)")]
    NotChiral,
    #[error("attachment site {0} is used by more than one level")]
    DuplicateSite(i64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix norm {norm} exceeds the exponential cap {cap}")]
    Overflow { norm: f64, cap: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("permanent of a {n}x{n} matrix exceeds the supported size {max}")]
    TooLarge { n: usize, max: usize },
    #[error("principal-value quadrature changed by {change:e} under grid refinement")]
    QuadratureDivergence { change: f64 },
    #[error("sigma_max never dropped below the reference level before t_max = {t_max}")]
    NoCrossing { t_max: f64 },
    #[error("no spectral gap of the bulk bands is available for the edge branch")]
    NoGap,
    #[error("edge branch moved by {shift:e} when the truncation depth was doubled")]
    Truncation { shift: f64 },
    #[error("excitation weight {weight:e} reached the far boundary of the lattice")]
    BoundaryReached { weight: f64 },
    #[error("excitation weight {weight:e} wrapped to the lattice ends")]
    Wraparound { weight: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    /// True for violations of a physical precondition (band membership, chirality,
    /// lattice size) as opposed to malformed input or numerical breakdown.
    pub fn is_physics_precondition(&self) -> bool {
        matches!(
            self,
            Error::OutOfBand { .. }
                | Error::MultipleRoots { .. }
                | Error::NotChiral
                | Error::NoGap
                | Error::BoundaryReached { .. }
                | Error::Wraparound { .. }
        )
    }

    /// True for failures of the numerical kernels themselves.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NoConvergence { .. }
                | Error::QuadratureDivergence { .. }
                | Error::NoCrossing { .. }
                | Error::Truncation { .. }
                | Error::NumericalFailure(_)
                | Error::TooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
