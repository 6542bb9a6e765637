use std::fmt;
use std::path::PathBuf;

use crate::geometry::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every violation found by scenario validation, in discovery order.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cell index ({i}, {j}) out of range for a {n}x{n} grid")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(Violations),

    #[error("negative weight {weight} on focus {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("quantization needs at least one bit")]
    ZeroQuantizationBits,

    #[error("cell ({i}, {j}): {source}")]
    Cell {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("phase map was generated from a different scenario")]
    FingerprintMismatch,

    #[error("observation point z = {z} mm is not on the transmission side (z > 0)")]
    BehindAperture { z: f64 },

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("grid holds no peaks")]
    NoPeaks,

    #[error("need at least {needed} peaks, found {found}")]
    TooFewPeaks { needed: usize, found: usize },

    #[error("{0}")]
    WrongPlane(String),

    #[error("focusing efficiency {0:.4} exceeds 1: model inconsistency")]
    EfficiencyAboveUnity(f64),

    #[error("weight asymmetry {delta} collapsed the weaker focus (fewer than two peaks)")]
    Overdrive { delta: f64 },

    #[error("calibration needs a template with exactly two foci, got {0}")]
    NotTwoFoci(usize),

    #[error("invalid calibration request: {0}")]
    InvalidCalibration(String),

    #[error("power ratio is not monotone in the weight asymmetry; trace: {trace:?}")]
    NonMonotone { trace: Vec<(f64, f64)> },

    #[error("config not found: {}", .0.display())]
    ConfigNotFound(PathBuf),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_cell(self, i: usize, j: usize) -> Self {
        Error::Cell {
            i,
            j,
            source: Box::new(self),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::ConfigNotFound(_) => 2,
            Error::EfficiencyAboveUnity(_) | Error::NonMonotone { .. } => 3,
            Error::Cell { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
