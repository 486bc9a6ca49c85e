//! Matrix-free time integration of antisymmetric linear systems.
//!
//! A [`LinearSystem`] is an operator apply plus an energy functional; the
//! stepper realizes a method through the nested stage recursion
//!
//! ```text
//! k_0 = 0,   k_j = c_j * h * L(u + k_{j-1}),   u <- u + k_s,
//! ```
//!
//! which costs one operator application per stage and stores one state
//! and one stage vector.

use crate::catalog::MethodDescriptor;
use crate::coeffs::stage_ratios;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

type ApplyFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type EnergyFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type ExactFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// A linear autonomous system `u' = Lu` with an energy functional
/// `E(u) = 0.5 ||u||^2_H`, given matrix-free.
pub struct LinearSystem {
    dim: usize,
    apply: Box<ApplyFn>,
    energy: Box<EnergyFn>,
    exact: Option<Box<ExactFn>>,
    norm_bound: Option<f64>,
}

impl LinearSystem {
    pub fn new(
        dim: usize,
        apply: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        energy: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            apply: Box::new(apply),
            energy: Box::new(energy),
            exact: None,
            norm_bound: None,
        }
    }

    /// Attaches a closed-form solution `t -> state`.
    pub fn with_exact(mut self, exact: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.exact = Some(Box::new(exact));
        self
    }

    /// Attaches a known bound on the operator norm (in the energy norm).
    pub fn with_norm_bound(mut self, bound: f64) -> Self {
        self.norm_bound = Some(bound);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies the operator: `out = L u`. `u` and `out` must not alias.
    pub fn apply_l(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        (self.apply)(u, out);
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        (self.energy)(u)
    }

    pub fn exact_at(&self, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|f| f(t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn norm_bound(&self) -> Option<f64> {
        self.norm_bound
    }

    /// Worst relative superposition defect of the operator over a few
    /// deterministic pseudo-random probe pairs.
    pub fn linearity_defect(&self, seed: u64) -> f64 {
        let n = self.dim;
        let mut rng = SplitMix64::new(seed);
        let mut worst = 0.0_f64;
        for _ in 0..4 {
            let x: Vec<f64> = (0..n).map(|_| rng.next_symmetric()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.next_symmetric()).collect();
            let (alpha, beta) = (rng.next_symmetric() * 2.0, rng.next_symmetric() * 2.0);
            let mut lx = vec![0.0; n];
            let mut ly = vec![0.0; n];
            let mut lz = vec![0.0; n];
            self.apply_l(&x, &mut lx);
            self.apply_l(&y, &mut ly);
            let z: Vec<f64> = (0..n).map(|i| alpha * x[i] + beta * y[i]).collect();
            self.apply_l(&z, &mut lz);
            let mut num = 0.0_f64;
            let mut den = 0.0_f64;
            for i in 0..n {
                let combined = alpha * lx[i] + beta * ly[i];
                num += (lz[i] - combined) * (lz[i] - combined);
                den += combined * combined;
            }
            worst = worst.max((num / den.max(1e-300)).sqrt());
        }
        worst
    }

    /// Probes `|E(u + eps * Lu) - E(u)|` relative to the energy scale; for
    /// a quadratic energy with antisymmetric operator this is O(eps^2), so
    /// the returned ratio (defect / eps / scale) is O(eps).
    pub fn antisymmetry_defect(&self, seed: u64, eps: f64) -> f64 {
        let n = self.dim;
        let mut rng = SplitMix64::new(seed);
        let u: Vec<f64> = (0..n).map(|_| rng.next_symmetric()).collect();
        let mut lu = vec![0.0; n];
        self.apply_l(&u, &mut lu);
        let shifted: Vec<f64> = (0..n).map(|i| u[i] + eps * lu[i]).collect();
        let e0 = self.energy(&u);
        let e1 = self.energy(&shifted);
        let scale = e0.max(self.energy(&lu)).max(1e-300);
        (e1 - e0).abs() / (eps * scale)
    }
}

/// Time series of energies from one integration run, recorded at step 0,
/// every `record_every` steps, and the final step.
#[derive(Debug, Clone)]
pub struct SimulationRecord {
    pub steps: Vec<u64>,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub final_state: Vec<f64>,
}

impl SimulationRecord {
    pub fn initial_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn final_energy(&self) -> f64 {
        *self.energies.last().unwrap()
    }
}

/// Reusable stage workspace realizing the low-storage recursion.
pub struct Stepper<'a> {
    system: &'a LinearSystem,
    ratios: Vec<f64>,
    stage: Vec<f64>,
    shifted: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(system: &'a LinearSystem, ratios: Vec<f64>) -> Self {
        let n = system.dim();
        Self {
            system,
            ratios,
            stage: vec![0.0; n],
            shifted: vec![0.0; n],
        }
    }

    pub fn from_method(system: &'a LinearSystem, method: &MethodDescriptor) -> Result<Self> {
        Ok(Self::new(system, stage_ratios(method.coefficients())?))
    }

    /// Advances `u` by one step of size `h` in place.
    pub fn advance(&mut self, h: f64, u: &mut [f64]) -> Result<()> {
        if h < 0.0 {
            return Err(Error::InvalidSpec("step size must be >= 0".into()));
        }
        self.stage.fill(0.0);
        for (j, &cj) in self.ratios.iter().enumerate() {
            for (shifted, (&ui, &ki)) in self.shifted.iter_mut().zip(u.iter().zip(&self.stage)) {
                *shifted = ui + ki;
            }
            self.system.apply_l(&self.shifted, &mut self.stage);
            let factor = cj * h;
            let mut finite = true;
            for x in self.stage.iter_mut() {
                *x *= factor;
                finite &= x.is_finite();
            }
            if !finite {
                return Err(Error::NonFiniteStage {
                    stage: j + 1,
                    step: 0,
                });
            }
        }
        for (ui, &ki) in u.iter_mut().zip(&self.stage) {
            *ui += ki;
        }
        Ok(())
    }
}

/// One step of a method given its stage ratios; `h = 0` returns `u`
/// unchanged.
pub fn rk_step(system: &LinearSystem, ratios: &[f64], h: f64, u: &[f64]) -> Result<Vec<f64>> {
    let mut next = u.to_vec();
    Stepper::new(system, ratios.to_vec()).advance(h, &mut next)?;
    Ok(next)
}

/// Runs `n_steps` uniform steps, recording the energy at step 0, every
/// `record_every` steps, and the final step.
pub fn integrate(
    system: &LinearSystem,
    method: &MethodDescriptor,
    h: f64,
    u0: &[f64],
    n_steps: usize,
    record_every: usize,
) -> Result<SimulationRecord> {
    if n_steps == 0 {
        return Err(Error::InvalidSpec("n_steps must be >= 1".into()));
    }
    if record_every == 0 {
        return Err(Error::InvalidSpec("record_every must be >= 1".into()));
    }
    let mut u = u0.to_vec();
    let mut stepper = Stepper::from_method(system, method)?;
    let mut steps = vec![0u64];
    let mut times = vec![0.0];
    let mut energies = vec![system.energy(&u)];
    for n in 1..=n_steps {
        stepper.advance(h, &mut u).map_err(|e| e.at_step(n))?;
        if n % record_every == 0 || n == n_steps {
            steps.push(n as u64);
            times.push(n as f64 * h);
            energies.push(system.energy(&u));
        }
    }
    Ok(SimulationRecord {
        steps,
        times,
        energies,
        final_state: u,
    })
}

/// Default relative-change tolerance for the operator-norm estimate.
pub const NORM_TOL: f64 = 1e-10;
/// Default iteration cap for the operator-norm estimate.
pub const NORM_MAX_ITER: usize = 5000;

/// Operator-norm estimate with a convergence flag.
#[derive(Debug, Clone, Copy)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Estimates `||L||` in the energy norm by power iteration on the
/// composition `v -> -L(Lv)`, which is self-adjoint positive semidefinite
/// in that norm for antisymmetric `L`. Norms are read off the energy
/// functional, so no explicit inner product is required.
pub fn operator_norm_estimate(
    system: &LinearSystem,
    tol: f64,
    max_iter: usize,
) -> Result<NormEstimate> {
    let n = system.dim();
    if n == 0 {
        return Err(Error::InvalidSpec("dimension must be >= 1".into()));
    }
    let h_norm = |v: &[f64]| (2.0 * system.energy(v)).max(0.0).sqrt();

    let mut rng = SplitMix64::new(0x7071_7EAA);
    let mut v = vec![0.0; n];
    let mut attempts = 0;
    loop {
        for x in v.iter_mut() {
            *x = rng.next_symmetric();
        }
        let norm = h_norm(&v);
        if norm > 1e-150 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            break;
        }
        attempts += 1;
        if attempts > 3 {
            return Err(Error::NormEstimateBreakdown);
        }
    }

    let mut lv = vec![0.0; n];
    let mut llv = vec![0.0; n];
    let mut estimate = 0.0_f64;
    for it in 1..=max_iter {
        system.apply_l(&v, &mut lv);
        let new_estimate = h_norm(&lv);
        system.apply_l(&lv, &mut llv);
        // v <- -L(Lv), renormalized in the energy norm.
        let next_norm = h_norm(&llv);
        if next_norm <= 1e-150 || !next_norm.is_finite() {
            return Err(Error::NormEstimateBreakdown);
        }
        for i in 0..n {
            v[i] = -llv[i] / next_norm;
        }
        let change = (new_estimate - estimate).abs();
        estimate = new_estimate;
        if change <= tol * estimate.max(1e-300) {
            return Ok(NormEstimate {
                value: estimate,
                converged: true,
                iterations: it,
            });
        }
    }
    Ok(NormEstimate {
        value: estimate,
        converged: false,
        iterations: max_iter,
    })
}

/// Largest strongly stable step `lambda / ||L||` for a method with a
/// stability bound.
pub fn max_stable_step(method: &MethodDescriptor, norm_l: f64) -> Result<f64> {
    if !(norm_l > 0.0) {
        return Err(Error::InvalidSpec("operator norm must be positive".into()));
    }
    match method.stability_bound() {
        Some(lambda) => Ok(lambda / norm_l),
        None => Err(Error::NotStronglyStable {
            index: method.stages().saturating_sub(1),
            value: f64::NAN,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, lookup};
    use crate::problems::oscillator::{self, OscillatorSpec};

    #[test]
    fn zero_step_is_identity() {
        let spec = OscillatorSpec::default();
        let sys = oscillator::build(&spec).unwrap();
        let rk4 = lookup("RK(4,4,5)").unwrap();
        let ratios = stage_ratios(rk4.coefficients()).unwrap();
        let u = vec![0.3, -0.7];
        assert_eq!(rk_step(&sys, &ratios, 0.0, &u).unwrap(), u);
    }

    #[test]
    fn forward_euler_step() {
        let spec = OscillatorSpec {
            omega: 2.0,
            ..OscillatorSpec::default()
        };
        let sys = oscillator::build(&spec).unwrap();
        let h = 0.01;
        let u = vec![1.0, -0.5];
        let next = rk_step(&sys, &[1.0], h, &u).unwrap();
        // u + h * L u with L = [[0, 1], [-omega^2, 0]].
        assert!((next[0] - (1.0 + h * -0.5)).abs() < 1e-16);
        assert!((next[1] - (-0.5 + h * -4.0)).abs() < 1e-16);
    }

    #[test]
    fn rk4_step_matches_quartic_rotation_polynomial() {
        // One RK4 step on the unit oscillator from (1, 0) lands exactly on
        // the degree-4 truncation of (cos h, -sin h).
        let sys = oscillator::build(&OscillatorSpec::default()).unwrap();
        let rk4 = lookup("RK(4,4,5)").unwrap();
        let ratios = stage_ratios(rk4.coefficients()).unwrap();
        for &h in &[0.1, 0.25, 0.5] {
            let next = rk_step(&sys, &ratios, h, &[1.0, 0.0]).unwrap();
            let x = 1.0 - h * h / 2.0 + h.powi(4) / 24.0;
            let v = -h + h.powi(3) / 6.0;
            assert!((next[0] - x).abs() < 1e-15, "h = {h}");
            assert!((next[1] - v).abs() < 1e-15, "h = {h}");
            // Against the true rotation: local error O(h^5).
            assert!((next[0] - h.cos()).abs() < h.powi(5) / 30.0);
            assert!((next[1] + h.sin()).abs() < h.powi(5) / 30.0);
        }
    }

    #[test]
    fn energies_follow_scalar_recursion() {
        // For the unit oscillator every power of L is an isometry, so
        // E_n = E_0 * (1 + sum b_k h^{2k})^n exactly.
        let sys = oscillator::build(&OscillatorSpec::default()).unwrap();
        let h = 0.3;
        for m in catalog() {
            let b = m.profile().coefficients.clone();
            let mut growth = 1.0;
            let mut pow = 1.0;
            for bk in &b {
                pow *= h * h;
                growth += bk * pow;
            }
            let record = integrate(&sys, &m, h, &[1.0, 0.0], 500, 100).unwrap();
            let e0 = record.initial_energy();
            for (idx, &step) in record.steps.iter().enumerate() {
                let expected = e0 * growth.powi(step as i32);
                let got = record.energies[idx];
                assert!(
                    ((got - expected) / expected).abs() < 1e-12,
                    "{} step {step}: {got} vs {expected}",
                    m.name()
                );
            }
        }
    }

    #[test]
    fn boundary_step_conserves_energy() {
        // h * ||L|| equal to the stability bound makes the modulus exactly
        // one; drift stays at accumulated round-off.
        let sys = oscillator::build(&OscillatorSpec::default()).unwrap();
        let rk4 = lookup("RK(4,4,5)").unwrap();
        let h = rk4.stability_bound().unwrap();
        let record = integrate(&sys, &rk4, h, &[1.0, 0.0], 200, 200).unwrap();
        let drift =
            (record.final_energy() - record.initial_energy()).abs() / record.initial_energy();
        assert!(drift < 1e-11, "drift {drift:e}");
    }

    #[test]
    fn integrate_guards() {
        let sys = oscillator::build(&OscillatorSpec::default()).unwrap();
        let rk4 = lookup("RK(4,4,5)").unwrap();
        assert!(integrate(&sys, &rk4, 0.1, &[1.0, 0.0], 0, 1).is_err());
        assert!(integrate(&sys, &rk4, 0.1, &[1.0, 0.0], 5, 0).is_err());
        let record = integrate(&sys, &rk4, 0.0, &[1.0, 0.0], 1, 1).unwrap();
        assert_eq!(record.initial_energy(), record.final_energy());
    }

    #[test]
    fn instability_reports_stage_and_step() {
        let sys = oscillator::build(&OscillatorSpec::default()).unwrap();
        let rk4 = lookup("RK(4,4,5)").unwrap();
        // Enormous step: iterates overflow to infinity after some steps.
        let err = integrate(&sys, &rk4, 8000.0, &[1.0, 0.0], 100, 1).unwrap_err();
        match err {
            Error::NonFiniteStage { stage, step } => {
                assert!(stage >= 1);
                assert!(step >= 1);
            }
            other => panic!("expected stage overflow, got {other}"),
        }
    }

    #[test]
    fn step_map_is_linear() {
        let sys = oscillator::build(&OscillatorSpec::default()).unwrap();
        assert!(sys.linearity_defect(7) < 1e-12);
        for m in catalog() {
            let ratios = stage_ratios(m.coefficients()).unwrap();
            let x = [0.3, -1.1];
            let y = [-0.9, 0.4];
            let (alpha, beta) = (1.7, -0.6);
            let sx = rk_step(&sys, &ratios, 0.2, &x).unwrap();
            let sy = rk_step(&sys, &ratios, 0.2, &y).unwrap();
            let z: Vec<f64> = (0..2).map(|i| alpha * x[i] + beta * y[i]).collect();
            let sz = rk_step(&sys, &ratios, 0.2, &z).unwrap();
            for i in 0..2 {
                let expected = alpha * sx[i] + beta * sy[i];
                assert!((sz[i] - expected).abs() <= 1e-12 * expected.abs().max(1.0));
            }
        }
    }

    #[test]
    fn norm_estimate_oscillator() {
        let unit = oscillator::build(&OscillatorSpec::default()).unwrap();
        let est = operator_norm_estimate(&unit, NORM_TOL, NORM_MAX_ITER).unwrap();
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-9);

        let fast = oscillator::build(&OscillatorSpec {
            omega: 2.0,
            ..OscillatorSpec::default()
        })
        .unwrap();
        let est = operator_norm_estimate(&fast, NORM_TOL, NORM_MAX_ITER).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn max_stable_step_cases() {
        let rk4 = lookup("RK(4,4,5)").unwrap();
        assert!((max_stable_step(&rk4, 1.0).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let five = lookup("RK(5,4,7)").unwrap();
        assert!((max_stable_step(&five, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        let p2 = lookup("RK(3,2,5)").unwrap();
        assert!(max_stable_step(&p2, 1.0).is_err());
        assert!(max_stable_step(&rk4, 0.0).is_err());
    }

    #[test]
    fn shared_between_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<LinearSystem>();
        assert_send_sync::<SimulationRecord>();
        assert_send_sync::<MethodDescriptor>();
    }
}
