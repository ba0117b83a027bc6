use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("antipodal points: geodesic distance undefined")]
    Antipodal,

    #[error("point coincides with the base point")]
    BasePointCoincidence,

    #[error("base point lies on the hypersurface at a grid node")]
    BasePointOnSurface,

    #[error("degenerate metric: condition number {0:.3e} exceeds threshold")]
    DegenerateMetric(f64),

    #[error("normal construction failed: {0}")]
    NormalConstruction(String),

    #[error("immersion condition violated: smallest Jacobian singular value {0:.3e}")]
    ImmersionFailure(f64),

    #[error("chart is not closed: axis {0} is neither periodic nor pole-capped")]
    NonClosedChart(usize),

    #[error("grid resolution too low: {got} < {min} on axis {axis}")]
    ResolutionTooLow { axis: usize, got: usize, min: usize },

    #[error("band limit too high: {modes} modes on axis with {nodes} nodes")]
    BandLimit { modes: usize, nodes: usize },

    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
