use thiserror::Error;

use crate::transforms::ShiftViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the open cell (0, π)")]
    OutsideCell { x: f64 },

    #[error("x = {x} sits on a δ lattice point")]
    LatticePoint { x: f64 },

    #[error("level index must be at least 1")]
    InvalidLevel,

    #[error("degenerate shift t = 0 (the auxiliary solution is undefined)")]
    DegenerateShift,

    #[error("level shift rejected: {0}")]
    InvalidShift(ShiftViolation),

    #[error("spectral weight ratio must be positive, got {0}")]
    NonPositiveRatio(f64),

    #[error("transform denominator vanishes near x = {x}")]
    SingularWeight { x: f64 },

    #[error("potential sample at x = {x} is not finite")]
    NonFinitePotential { x: f64 },

    #[error("energy window [{0}, {1}] is empty")]
    InvalidWindow(f64, f64),

    #[error("comb strength mismatch: anchor built for {anchor}, requested {requested}")]
    CombMismatch { anchor: f64, requested: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("integrator failure: {0}")]
    Integration(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for config/validation problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Integration(_) | Error::NonFinitePotential { .. } | Error::SingularWeight { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
