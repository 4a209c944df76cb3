use thiserror::Error;

/// Failures raised by the geometric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tangent vectors span a degenerate plane (|u|^2|v|^2 - <u,v>^2 = {0:e})")]
    DegeneratePlane(f64),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("curve speed deviates from unit speed by {0:e}")]
    NonUnitSpeedCurve(f64),
    #[error("loop endpoints differ by {0:e}")]
    OpenLoop(f64),
    #[error("parameter {0} is within one grid cell of a curve endpoint")]
    BoundaryParameter(f64),
    #[error("|a|+|b| = {rho} exceeds the chart-ball radius {limit}")]
    RadiusTooLarge { rho: f64, limit: f64 },
    #[error("chord-curvature fit produced a negative cubic coefficient {0:e}")]
    NegativeFitCoefficient(f64),
    #[error("majorization could not be verified: {0}")]
    MajorizationUnverified(String),
    #[error("curve lengths differ: {0} vs {1}")]
    LengthMismatch(f64, f64),
    #[error("degenerate vertex link at vertex {0}")]
    DegenerateLink(usize),
    #[error("surface is not convex (max violation {0:e})")]
    NotConvex(f64),
    #[error("operation requires a Cartan-Hadamard ambient space")]
    NotCartanHadamard,
    #[error("operation requires Euclidean ambient space")]
    AmbientNotEuclidean,
    #[error("degenerate hull input: {0}")]
    DegenerateInput(String),
    #[error("hull is degenerate")]
    DegenerateHull,
    #[error("operation is not supported in this model space")]
    UnsupportedSpace,
    #[error("point lies in the interior of the hull")]
    InteriorPoint,
    #[error("point lies outside the hull")]
    ExteriorPoint,
    #[error("sectional curvature of tangent planes reaches {0:e}, above the flatness tolerance")]
    NotFlatOnTangentPlanes(f64),
    #[error("transport is path dependent (defect {0:e})")]
    PathDependence(f64),
    #[error("grids do not match")]
    GridMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mesh topology: {0}")]
    Topology(String),
    #[error("config: {0}")]
    Config(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
