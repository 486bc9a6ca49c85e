//! Property tests of the coefficient algebra and the step map.

use num_complex::Complex64;
use proptest::prelude::*;

use esrk::catalog::catalog;
use esrk::coeffs::{amplification, energy_coefficients, stage_ratios, RkCoefficients};
use esrk::integrate::rk_step;
use esrk::problems::{maxwell, oscillator};

mod common;

fn arbitrary_coefficients() -> impl Strategy<Value = RkCoefficients> {
    (1usize..=7)
        .prop_flat_map(|s| {
            proptest::collection::vec(-2.0..2.0f64, s).prop_map(move |mut tail| {
                // Keep the last coefficient away from zero.
                let last = tail.last_mut().unwrap();
                if last.abs() < 1e-3 {
                    *last = 1e-3_f64.copysign(if *last == 0.0 { 1.0 } else { *last });
                }
                let mut a = vec![1.0];
                a.extend(tail);
                a
            })
        })
        .prop_map(|a| RkCoefficients::new(a).unwrap())
}

proptest! {
    /// b_s = a_s^2 for every valid coefficient set (the boundary term of
    /// the expansion).
    #[test]
    fn trailing_energy_coefficient_is_square(c in arbitrary_coefficients()) {
        let b = energy_coefficients(&c);
        let a_s = *c.coeffs().last().unwrap();
        let expected = a_s * a_s;
        prop_assert!((b.last().unwrap() - expected).abs() <= 1e-15 * expected.max(1e-30));
    }

    /// |G(iy)|^2 = 1 + sum b_k y^{2k} on the imaginary axis.
    #[test]
    fn modulus_identity(c in arbitrary_coefficients(), y in 0.0..3.0f64) {
        let b = energy_coefficients(&c);
        let lhs = amplification(&c, Complex64::new(0.0, y)).norm_sqr();
        let mut rhs = 1.0;
        let mut magnitude = 1.0;
        let mut pow = 1.0;
        let y2 = y * y;
        for bk in &b {
            pow *= y2;
            rhs += bk * pow;
            magnitude += bk.abs() * pow;
        }
        // Tolerance tracks the cancellation the alternating sum can carry.
        prop_assert!((lhs - rhs).abs() <= 1e-12 * magnitude.max(lhs));
    }

    /// Telescoping: expanding the nested stage form recovers every
    /// monomial coefficient.
    #[test]
    fn stage_form_round_trip(c in arbitrary_coefficients()) {
        prop_assume!(c.coeffs().iter().all(|x| x.abs() > 1e-6));
        let ratios = stage_ratios(&c).unwrap();
        let s = ratios.len();
        let mut product = 1.0;
        for k in 1..=s {
            product *= ratios[s - k];
            let target = c.coeffs()[k];
            // Ratio round-trips lose relative accuracy when the chain
            // passes through large quotients; scale accordingly.
            prop_assert!((product - target).abs() <= 1e-10 * target.abs().max(1.0));
        }
    }
}

#[test]
fn modulus_identity_is_tight_for_catalog_methods() {
    // The catalog methods carry near-cancelling interior terms; the
    // identity still holds to 1e-12 relative on a fixed grid.
    for m in catalog() {
        let b = energy_coefficients(m.coefficients());
        let mut y = 0.0;
        while y <= 5.0 {
            let lhs = amplification(m.coefficients(), Complex64::new(0.0, y)).norm_sqr();
            let mut rhs = 1.0;
            let y2 = y * y;
            let mut pow = 1.0;
            for bk in &b {
                pow *= y2;
                rhs += bk * pow;
            }
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.max(1.0),
                "{} at y = {y}: {lhs} vs {rhs}",
                m.name()
            );
            y += 0.05;
        }
    }
}

#[test]
fn step_superposition_on_oscillator_and_cavity() {
    let osc = oscillator::build(&oscillator::OscillatorSpec::default()).unwrap();
    let cavity_spec = maxwell::MaxwellSpec::pulse_cavity(16);
    let cavity = maxwell::build(&cavity_spec).unwrap();
    let mut rng = common::TestRng::new(99);

    for (system, h) in [
        (&osc, 0.25),
        (&cavity, 0.2 * cavity_spec.dx() / cavity_spec.light_speed()),
    ] {
        let n = system.dim();
        for m in catalog() {
            let ratios = stage_ratios(m.coefficients()).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.symmetric()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.symmetric()).collect();
            let (alpha, beta) = (rng.symmetric() * 2.0, rng.symmetric() * 2.0);
            let sx = rk_step(system, &ratios, h, &x).unwrap();
            let sy = rk_step(system, &ratios, h, &y).unwrap();
            let z: Vec<f64> = (0..n).map(|i| alpha * x[i] + beta * y[i]).collect();
            let sz = rk_step(system, &ratios, h, &z).unwrap();
            let scale = sz.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1.0);
            for i in 0..n {
                let expected = alpha * sx[i] + beta * sy[i];
                assert!(
                    (sz[i] - expected).abs() <= 1e-12 * scale,
                    "{} component {i}",
                    m.name()
                );
            }
        }
    }
}
