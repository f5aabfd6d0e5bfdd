use num_complex::Complex64;
use thiserror::Error;

use crate::dirichlet::McEstimate;
use crate::equilibrium::EquilibriumResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is not strictly inside the domain")]
    PointOutsideDomain(Complex64),

    #[error("point {0} lies on the boundary")]
    PointOnBoundary(Complex64),

    #[error("degenerate Moebius map: ad - bc vanishes relative to the coefficient scale")]
    DegenerateMap,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid radius {0}: must be positive")]
    InvalidRadius(f64),

    #[error("log|w| circle average is undefined for r = 0 and w = 0")]
    UndefinedAtZero,

    #[error("field evaluates to -inf inside the mollifier support at {0}")]
    SingularityInSupport(Complex64),

    #[error("field returned an inadmissible value {value} at {at}")]
    InvalidFieldValue { at: Complex64, value: f64 },

    #[error("nodes {0} and {1} coincide while both carry positive weight")]
    CoincidentNodes(usize, usize),

    #[error("nodes {0} and {1} coincide")]
    DuplicateNodes(usize, usize),

    #[error("probe {0} is too close to a singularity for the stencil")]
    ProbeTooCloseToSingularity(Complex64),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("optimizer did not reach the projected-gradient tolerance")]
    NotConverged(Box<EquilibriumResult>),

    #[error("point {0} is not in the upper half-plane")]
    NotInUpperHalfPlane(Complex64),

    #[error("only {} of {} walks were absorbed", .0.n_absorbed, .0.n_samples)]
    TooFewAbsorbed(McEstimate),

    #[error("map does not carry the source domain onto the target domain: {0}")]
    MapDomainMismatch(String),

    #[error("pole hit: Green's function is +inf at {0}")]
    PoleHit(Complex64),

    #[error("probe {0} is inside the closed unit disc")]
    ProbeInsideDisc(Complex64),

    #[error(
        "cloud is undersampled: nearest-neighbour spacing {spacing} vs smallest delta {delta}"
    )]
    UndersampledCloud { spacing: f64, delta: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
