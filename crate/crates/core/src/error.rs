use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate state: norm {norm:e} is below 1e-12")]
    DegenerateState { norm: f64 },

    #[error("invalid dimension {0}: at least 2 is required")]
    InvalidDimension(usize),

    #[error("operator is not hermitian: max |A - A^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error(
        "undefined weak value: orthogonal selection (|<post|pre>|^2 = {prob:e} <= floor {floor:e})"
    )]
    OrthogonalSelection { prob: f64, floor: f64 },

    #[error("basis is not orthonormal and complete: deviation {deviation:e}")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("at least {required} states are required, got {found}")]
    TooFewStates { required: usize, found: usize },

    #[error("vanishing overlap between consecutive states {index} and {next}")]
    VanishingOverlap { index: usize, next: usize },

    #[error("geodesic not unique: endpoints are orthogonal")]
    GeodesicNotUnique,

    #[error("degenerate geodesic: endpoints are the same ray")]
    DegenerateGeodesic,

    #[error("no built-in SIC for dimension {0}; supply a fiducial file instead")]
    UnsupportedSicDimension(usize),

    #[error("not a SIC fiducial: worst pair ({i}, {j}) has |<psi_i|psi_j>|^2 = {overlap:.6e}, expected {expected:.6e}")]
    NotSicFiducial {
        i: usize,
        j: usize,
        overlap: f64,
        expected: f64,
    },

    #[error("indices must be distinct and below {len}: got {indices:?}")]
    InvalidIndices { indices: Vec<usize>, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("post-selection starved: no shots were accepted")]
    PostSelectionStarved,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that come from the mathematics of the inputs (orthogonal
    /// selections, non-SIC fiducials, ...) rather than malformed input.
    pub fn is_numerical_domain(&self) -> bool {
        matches!(
            self,
            Error::DegenerateState { .. }
                | Error::OrthogonalSelection { .. }
                | Error::NonOrthonormalBasis { .. }
                | Error::VanishingOverlap { .. }
                | Error::GeodesicNotUnique
                | Error::DegenerateGeodesic
                | Error::NotSicFiducial { .. }
                | Error::PostSelectionStarved
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
