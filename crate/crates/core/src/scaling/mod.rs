//! Scaling-limit extraction from finite-size data.

mod finite;
mod limits;
mod richardson;

pub use finite::FiniteSizeData;
pub use limits::{
    check_functional_equations, check_functional_equations_with, check_symmetries, check_symmetries_with, e1_from_c,
    estimate_c_mu, estimate_c_mu_with, gap_scaling, gap_scaling_with, series_c, CEstimate, FunctionalResiduals, Quantity,
    ScalingSample, ScalingTable, SymmetryResiduals, DEFAULT_LS, STEP,
};
pub use richardson::{neville, richardson, ExtrapolationResult};

use crate::bethe_finite::BetheError;
use crate::numerics::NumericsError;

#[derive(Debug, thiserror::Error)]
pub enum ScalingError {
    #[error("need at least {need} points, have {have}")]
    InsufficientPoints { have: usize, need: usize },
    #[error("two samples share the same abscissa")]
    DegenerateAbscissa,
    #[error("x^-1 coefficient {fitted} deviates from 8i*pi/mu by {relative_deviation:.3}")]
    MomentumGate { fitted: String, relative_deviation: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Bethe(#[from] BetheError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
