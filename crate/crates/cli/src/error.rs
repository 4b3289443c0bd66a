use wasep::bethe_finite::BetheError;
use wasep::edge::EdgeError;
use wasep::markov_oracle::OracleError;
use wasep::scaling::ScalingError;
use wasep::series::SeriesError;
use wasep::NumericsError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("no convergence: {0}")]
    Nonconvergence(String),
    #[error("consistency gate failed: {0}")]
    Gate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Nonconvergence(_) => 3,
            CliError::Gate(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::InvalidContext(_) | NumericsError::Domain(_) => CliError::Validation(e.to_string()),
            _ => CliError::Nonconvergence(e.to_string()),
        }
    }
}

impl From<BetheError> for CliError {
    fn from(e: BetheError) -> Self {
        match e {
            BetheError::InvalidParameters(_) => CliError::Validation(e.to_string()),
            BetheError::WrongState { .. } => CliError::Gate(e.to_string()),
            _ => CliError::Nonconvergence(e.to_string()),
        }
    }
}

impl From<EdgeError> for CliError {
    fn from(e: EdgeError) -> Self {
        match e {
            EdgeError::InvalidParameters(_) | EdgeError::TruncationTooSmall { .. } => CliError::Validation(e.to_string()),
            EdgeError::Numerics(n) => n.into(),
            _ => CliError::Nonconvergence(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DimensionOverflow(_) | OracleError::InvalidParameters(_) => CliError::Validation(e.to_string()),
            OracleError::Numerics(n) => n.into(),
            _ => CliError::Nonconvergence(e.to_string()),
        }
    }
}

impl From<ScalingError> for CliError {
    fn from(e: ScalingError) -> Self {
        match e {
            ScalingError::Bethe(b) => b.into(),
            ScalingError::Numerics(n) => n.into(),
            ScalingError::MomentumGate { .. } => CliError::Gate(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::InvalidOrder(_) | SeriesError::OrderCap { .. } | SeriesError::Parse(_) => CliError::Validation(e.to_string()),
            SeriesError::Numerics(n) => n.into(),
            _ => CliError::Gate(e.to_string()),
        }
    }
}
