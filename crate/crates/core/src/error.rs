use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid qubit count {0}")]
    InvalidQubitCount(usize),
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coefficient {0} is not finite")]
    NonFiniteCoefficient(f64),
    #[error("term {0} mixes measurement bases")]
    MixedBasis(String),
    #[error("circuit needs at least one layer")]
    InvalidLayers,
    #[error("parameter {index} has no gate (D = {n_params})")]
    UnusedParameter { index: usize, n_params: usize },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("{0} qubits exceeds the dense diagonalization cap")]
    TooLargeForDense(usize),
    #[error("need at least one calibration point")]
    NoCalibrationPoints,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("kernel parameter {name} = {value} must be positive")]
    InvalidKernelParam { name: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("derivative axis {axis} out of range for D = {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("kernel matrix not positive definite after jitter {jitter:e}")]
    Factorization { jitter: f64 },
    #[error("retention limit must be positive")]
    ZeroLimit,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsrError {
    #[error("shift {0} has sin(alpha) = 0")]
    DegenerateShift(f64),
    #[error("expected {expected} observations, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parameter {name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
}

#[derive(Debug, Error)]
pub enum OptError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("need at least {needed} points for an order-{v} fit, found {found}")]
    TooFewPoints { needed: usize, v: usize, found: usize },
    #[error("trigonometric design is rank deficient")]
    RankDeficient,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Psr(#[from] PsrError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no records to aggregate")]
    EmptyRecords,
    #[error("nothing to plot")]
    EmptySeries,
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
