//! Shared fixtures for the criterion benchmarks.

use esrk::catalog::{lookup, MethodDescriptor};
use esrk::integrate::LinearSystem;
use esrk::problems::{maxwell, oscillator, peridynamics};

pub fn four_stage() -> MethodDescriptor {
    lookup("RK(4,4,5)").expect("catalog method")
}

pub fn seven_stage() -> MethodDescriptor {
    lookup("RK(7,4,11)").expect("catalog method")
}

pub fn oscillator_system() -> (LinearSystem, Vec<f64>) {
    let spec = oscillator::OscillatorSpec::default();
    let system = oscillator::build(&spec).expect("oscillator builds");
    let state = oscillator::initial_state(&spec);
    (system, state)
}

pub fn bar_system(nx: usize) -> (LinearSystem, Vec<f64>, f64) {
    let spec = peridynamics::PeridynamicsSpec::bar(nx);
    let system = peridynamics::build(&spec).expect("bar builds");
    let state = peridynamics::initial_state(&spec);
    (system, state, spec.dx())
}

pub fn cavity_system(nx: usize) -> (LinearSystem, Vec<f64>, maxwell::MaxwellSpec) {
    let spec = maxwell::MaxwellSpec::pulse_cavity(nx);
    let system = maxwell::build(&spec).expect("cavity builds");
    let state = maxwell::initial_state(&spec);
    (system, state, spec)
}
