use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameters ({p}, {q}, {r}) are not hyperbolic: 1/p + 1/q + 1/r >= 1")]
    NonHyperbolic { p: u32, q: u32, r: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({0}, {1}) is not inside the unit disk")]
    OutsideDisk(f64, f64),
    #[error("no choice of rotation signs satisfies the triangle relation")]
    RelationFailure,
    #[error("graph ball would exceed the vertex cap of {0}")]
    DepthOverflow(usize),
    #[error("faces are infinite when r is infinite")]
    InfiniteFace,
    #[error("walk left the materialized graph ball")]
    BallTooSmall,
    #[error("edge is not part of the face")]
    EdgeNotInFace,
    #[error("edge is not the image of the base edge: {0}")]
    NotRepresentable(String),
    #[error("closed forms are not defined for ({p}, {q}, {r})")]
    UnsupportedParams { p: u32, q: u32, r: String },
    #[error("there is no exceptional pair when r is infinite")]
    NoException,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("validation failed: {0}")]
    ValidationFailure(String),
    #[error("{0} outgoing spectacles contain the target point")]
    Ambiguous(usize),
    #[error("no outgoing spectacle contains the target point")]
    NoMatch,
    #[error("the two boundary points coincide")]
    EndpointsEqual,
    #[error("seed paths never stabilized")]
    NoStabilization,
    #[error("no period detected in the observed code")]
    PeriodNotDetected,
    #[error("holonomy does not map the start edge to the end edge")]
    EdgeMismatch,
    #[error("exponent {exp} out of range 1..{max} for letter {letter}")]
    ExponentOutOfRange { letter: char, exp: u32, max: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
