use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wavefunction has zero norm")]
    ZeroNorm,
    #[error("wavefunctions or samples live on different grids")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("potential is not a double well: {0}")]
    NotDoubleWell(String),
    #[error("protocol duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("parallel-motion validity violated: {0}")]
    ValidityViolation(String),
    #[error("displacement {shift} exceeds a quarter of the grid span {span}")]
    ShiftTooLarge { shift: f64, span: f64 },
    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("grid too coarse: level {level} moved by {relative_shift:e} under refinement")]
    GridTooCoarse { level: usize, relative_shift: f64 },
    #[error("grid too small for the requested state: {0}")]
    GridTooSmall(String),
    #[error("state {index} is delocalised between the wells (left fraction {fraction:.4})")]
    Ambiguous { index: usize, fraction: f64 },
    #[error("propagation unstable at t = {time}")]
    UnstableStep { time: f64 },
    #[error("norm drifted to {norm} at t = {time}")]
    NormLoss { time: f64, norm: f64 },
    #[error("density {density:e} reached the grid edge at t = {time}")]
    EdgeLeakage { time: f64, density: f64 },
    #[error("time step not converged: discrepancy {0:e}")]
    NotConverged(f64),
    #[error("operation requires a {expected} scenario")]
    WrongScenario { expected: &'static str },
    #[error("no state localised in the {0} well among the computed levels")]
    NoWellState(&'static str),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
