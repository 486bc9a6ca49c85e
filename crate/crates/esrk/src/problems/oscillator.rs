//! Harmonic oscillator `x'' + omega^2 x = 0` as a two-dimensional
//! antisymmetric system with energy `0.5 (omega^2 x^2 + v^2)`.

use crate::error::{Error, Result};
use crate::integrate::LinearSystem;

#[derive(Debug, Clone, Copy)]
pub struct OscillatorSpec {
    /// Angular frequency.
    pub omega: f64,
    pub x0: f64,
    pub v0: f64,
    pub t_final: f64,
}

impl Default for OscillatorSpec {
    /// The benchmark configuration: unit frequency, unit displacement at
    /// rest, integrated to t = 80.
    fn default() -> Self {
        Self {
            omega: 1.0,
            x0: 1.0,
            v0: 0.0,
            t_final: 80.0,
        }
    }
}

impl OscillatorSpec {
    fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::InvalidSpec("omega must be positive".into()));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::InvalidSpec("final time must be positive".into()));
        }
        Ok(())
    }
}

pub fn initial_state(spec: &OscillatorSpec) -> Vec<f64> {
    vec![spec.x0, spec.v0]
}

/// Builds the system: state `[x, v]`, operator `[[0, 1], [-omega^2, 0]]`,
/// exact solution the rotation with frequency `omega`. The operator norm
/// in the energy norm is exactly `omega`.
pub fn build(spec: &OscillatorSpec) -> Result<LinearSystem> {
    spec.validate()?;
    let OscillatorSpec { omega, x0, v0, .. } = *spec;
    let omega_sq = omega * omega;
    Ok(LinearSystem::new(
        2,
        move |u, out| {
            out[0] = u[1];
            out[1] = -omega_sq * u[0];
        },
        move |u| 0.5 * (omega_sq * u[0] * u[0] + u[1] * u[1]),
    )
    .with_exact(move |t| {
        let (sin, cos) = (omega * t).sin_cos();
        vec![x0 * cos + (v0 / omega) * sin, -omega * x0 * sin + v0 * cos]
    })
    .with_norm_bound(omega))
}
