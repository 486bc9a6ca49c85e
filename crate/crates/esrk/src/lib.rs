//! Energy-superconvergent explicit Runge-Kutta time integration for
//! antisymmetric autonomous linear systems.
//!
//! On `u' = Lu` with `L` antisymmetric in some inner product, an explicit
//! RK method reduces to a stability polynomial in `hL`, and the discrete
//! energy evolves by a polynomial in `h^2` whose leading index can be
//! pushed far beyond the stage count by choosing the free coefficients to
//! zero the interior terms. This crate provides:
//!
//! - [`coeffs`]: the coefficient algebra — energy coefficients, solution
//!   and energy orders, stage ratios, strong-stability bounds, and the
//!   amplification polynomial;
//! - [`catalog`]: the named second- and fourth-order method families with
//!   closed-form coefficients, plus an independent Newton re-derivation;
//! - [`integrate`]: matrix-free low-storage stepping, energy recording,
//!   and operator-norm estimation;
//! - [`problems`]: harmonic oscillator, a linear nonlocal wave model on a
//!   periodic bar, and a 1D Maxwell cavity with its leapfrog baseline;
//! - [`analysis`]: error norms, convergence orders, stability regions,
//!   and energy-decay fits;
//! - [`experiments`]: ready-made benchmark drivers behind the CLI and the
//!   acceptance suite.

// Guards written as `!(x > 0.0)` reject NaN along with nonpositive
// values; the non-negated forms do not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalog;
pub mod coeffs;
pub mod error;
pub mod experiments;
pub mod integrate;
pub mod problems;
mod rng;

pub use analysis::{ConvergenceRow, ConvergenceTable, ResolutionErrors, StabilityRegion, Window};
pub use catalog::{EscSolveReport, MethodDescriptor};
pub use coeffs::{EnergyProfile, RkCoefficients};
pub use error::{Error, Result};
pub use integrate::{LinearSystem, NormEstimate, SimulationRecord, Stepper};
