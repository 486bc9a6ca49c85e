use std::fmt;

/// Errors raised by coefficient algebra, integration, and analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coefficient vector violates a structural invariant
    /// (leading coefficient must be 1, last coefficient nonzero, ...).
    InvalidCoefficients(String),
    /// An interior monomial coefficient is zero, so the nested stage form
    /// is undefined.
    DegenerateCoefficient { index: usize },
    /// The energy coefficients do not satisfy the strong-stability
    /// conditions; carries the first offending coefficient.
    NotStronglyStable { index: usize, value: f64 },
    /// An energy-coefficient vector with no nonzero entry.
    AllZeroEnergyCoefficients,
    /// A stage of the step recursion produced a non-finite value,
    /// signalling instability. `step` is 1-based, 0 when unknown.
    NonFiniteStage { stage: usize, step: usize },
    /// Power iteration could not find a usable start vector.
    NormEstimateBreakdown,
    /// Adaptive quadrature could not reach the requested tolerance;
    /// reports the achieved error bound and the best value.
    QuadratureTolerance {
        requested: f64,
        achieved: f64,
        value: f64,
    },
    /// A problem or run specification is invalid.
    InvalidSpec(String),
    /// Relative energy deviation is undefined for zero reference energy.
    ZeroReferenceEnergy,
    /// Convergence tables require resolutions that double row to row.
    NonDoublingResolutions { coarse: usize, fine: usize },
    /// Every recorded energy deviation sits at the round-off floor, so a
    /// decay fit is meaningless.
    EnergyAtRoundoff,
    /// Not enough usable samples for a fit.
    TooFewSamples { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidCoefficients(msg) => write!(f, "invalid coefficients: {msg}"),
            Self::DegenerateCoefficient { index } => write!(
                f,
                "degenerate coefficient a_{index} = 0; stage form unavailable"
            ),
            Self::NotStronglyStable { index, value } => write!(
                f,
                "not strongly stable under the energy-coefficient conditions: b_{index} = {value:e}"
            ),
            Self::AllZeroEnergyCoefficients => {
                write!(f, "energy coefficients are all zero; malformed input")
            }
            Self::NonFiniteStage { stage, step } => {
                if *step == 0 {
                    write!(f, "overflow/NaN in stage {stage}")
                } else {
                    write!(f, "overflow/NaN in stage {stage} at step {step}")
                }
            }
            Self::NormEstimateBreakdown => {
                write!(f, "power iteration breakdown: no usable start vector")
            }
            Self::QuadratureTolerance {
                requested,
                achieved,
                value,
            } => write!(
                f,
                "quadrature reached {achieved:e}, requested {requested:e} (value {value:e})"
            ),
            Self::InvalidSpec(msg) => write!(f, "invalid specification: {msg}"),
            Self::ZeroReferenceEnergy => write!(f, "reference energy is zero"),
            Self::NonDoublingResolutions { coarse, fine } => write!(
                f,
                "resolutions must double: got {coarse} followed by {fine}"
            ),
            Self::EnergyAtRoundoff => {
                write!(f, "energy exactly conserved to precision; nothing to fit")
            }
            Self::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} usable samples, got {got}")
            }
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Attaches a 1-based step index to a stage failure.
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            Self::NonFiniteStage { stage, .. } => Self::NonFiniteStage { stage, step },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
