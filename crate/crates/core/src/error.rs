use thiserror::Error;

/// Errors surfaced by every numerical operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: left endpoint must be strictly below right")]
    BadInterval { a: f64, b: f64 },
    #[error("point {x} lies outside the trusted window [{a}, {b}]")]
    OutOfWindow { x: f64, a: f64, b: f64 },
    #[error("value {y} lies outside the range [{lo}, {hi}] of the map")]
    OutOfRange { y: f64, lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("windows do not overlap")]
    EmptyWindow,
    #[error("degenerate step: {0}")]
    DegenerateStep(String),
    #[error("map has no derivative")]
    MissingDerivative,
    #[error("derivative is not positive at x = {x}")]
    NonpositiveDerivative { x: f64 },
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("bad catalog parameters: {0}")]
    BadParams(String),
    #[error("adaptive quadrature exceeded depth {depth} on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, depth: usize },
    #[error("zero mass on [{a}, {b}]")]
    ZeroMass { a: f64, b: f64 },
    #[error("no exponent in the grid satisfies the reverse Hölder bound under cap {cap}")]
    NoValidP { cap: f64 },
    #[error("input {0} is a pole of the Cayley transform")]
    PoleInput(String),
    #[error("point maps within {margin:e} of the unit circle")]
    BoundaryBlowup { margin: f64 },
    #[error("|F_z| = {value:e} is too small at ({x}, {y})")]
    DegenerateJacobian { x: f64, y: f64, value: f64 },
    #[error("|mu| = {value} is not below 1 at ({x}, {y})")]
    NotQuasiconformal { x: f64, y: f64, value: f64 },
    #[error("dilatation grids do not match")]
    GridMismatch,
    #[error("pair at hyperbolic distance {0:e} is degenerate")]
    DegeneratePair(f64),
    #[error("box [{a}, {b}] x (0, {height}] exceeds the density window")]
    WindowExceeded { a: f64, b: f64, height: f64 },
    #[error("density is within {0:e} of the Cayley pole")]
    PoleProximity(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
