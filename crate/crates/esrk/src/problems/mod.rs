//! Benchmark systems: the harmonic oscillator, a linear nonlocal wave
//! model on a periodic bar, and the 1D Maxwell cavity with its leapfrog
//! baseline. Each problem packages a [`crate::integrate::LinearSystem`],
//! an initial state, and an exact solution for error measurement.

pub mod maxwell;
pub mod oscillator;
pub mod peridynamics;
