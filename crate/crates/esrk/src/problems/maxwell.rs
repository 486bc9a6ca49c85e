//! One-dimensional Maxwell cavity on a staggered grid with perfectly
//! conducting ends, plus the leapfrog (Yee) baseline.
//!
//! Electric nodes sit at `x_j = x_lo + j dx`, `j = 0..=nx`, with the
//! boundary values pinned to zero; magnetic nodes sit at the half-integer
//! points `x_{j+1/2}`, the last one outside the domain and identically
//! zero. The semi-discrete curl system is antisymmetric in the energy
//! `0.5 (eps0 ||E||^2 + mu0 ||H||^2)` on the pinned subspace, with
//! operator norm at most `2 c / dx`.

use crate::error::{Error, Result};
use crate::integrate::LinearSystem;

/// CODATA vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;
/// CODATA vacuum permeability, H/m.
pub const VACUUM_PERMEABILITY: f64 = 1.25663706212e-6;

/// Effective half-width of the pulse envelope: `exp(-5 x^2)` is below
/// 2e-9 beyond |x| = 2.
const PULSE_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy)]
pub struct MaxwellSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Cell count; the electric field has `nx + 1` nodes.
    pub nx: usize,
    /// Carrier wavelength of the initial pulse, meters.
    pub carrier_wavelength: f64,
    /// Final time, seconds.
    pub t_final: f64,
    pub eps0: f64,
    pub mu0: f64,
}

impl MaxwellSpec {
    /// The benchmark cavity: domain [-5, 5] m, 0.2 m carrier, run for
    /// 10 ns so the pulse never reaches the walls.
    pub fn pulse_cavity(nx: usize) -> Self {
        Self {
            x_lo: -5.0,
            x_hi: 5.0,
            nx,
            carrier_wavelength: 0.2,
            t_final: 1e-8,
            eps0: VACUUM_PERMITTIVITY,
            mu0: VACUUM_PERMEABILITY,
        }
    }

    pub fn light_speed(&self) -> f64 {
        1.0 / (self.eps0 * self.mu0).sqrt()
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.nx as f64
    }

    /// Upper bound on the operator norm of the semi-discrete system.
    pub fn norm_bound(&self) -> f64 {
        2.0 * self.light_speed() / self.dx()
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 4 {
            return Err(Error::InvalidSpec("need at least 4 cells".into()));
        }
        if !(self.dx() > 0.0) {
            return Err(Error::InvalidSpec("domain must have positive width".into()));
        }
        if !(self.carrier_wavelength > 0.0) {
            return Err(Error::InvalidSpec(
                "carrier wavelength must be positive".into(),
            ));
        }
        if !(self.eps0 > 0.0 && self.mu0 > 0.0) {
            return Err(Error::InvalidSpec(
                "material constants must be positive".into(),
            ));
        }
        let half_width = 0.5 * (self.x_hi - self.x_lo);
        if self.light_speed() * self.t_final >= half_width - PULSE_RADIUS {
            return Err(Error::InvalidSpec(
                "run long enough for the pulse to reach the boundary".into(),
            ));
        }
        Ok(())
    }
}

/// Initial pulse `exp(-5 x^2) sin(2 pi x / wavelength)`.
pub fn pulse(spec: &MaxwellSpec, x: f64) -> f64 {
    (-5.0 * x * x).exp() * (2.0 * std::f64::consts::PI * x / spec.carrier_wavelength).sin()
}

/// Electric node positions `x_lo + j dx`, `j = 0..=nx`.
pub fn e_nodes(spec: &MaxwellSpec) -> Vec<f64> {
    let dx = spec.dx();
    (0..=spec.nx).map(|j| spec.x_lo + j as f64 * dx).collect()
}

/// Exact electric field at time `t`: the left/right-travelling split of
/// the initial pulse.
pub fn exact_e(spec: &MaxwellSpec, t: f64) -> Vec<f64> {
    let c = spec.light_speed();
    e_nodes(spec)
        .iter()
        .map(|&x| 0.5 * (pulse(spec, x + c * t) + pulse(spec, x - c * t)))
        .collect()
}

/// Pulse in the electric field, zero magnetic field, boundary nodes
/// pinned exactly.
pub fn initial_state(spec: &MaxwellSpec) -> Vec<f64> {
    let n = spec.nx;
    let mut state = vec![0.0; 2 * (n + 1)];
    for (j, &x) in e_nodes(spec).iter().enumerate() {
        state[j] = pulse(spec, x);
    }
    state[0] = 0.0;
    state[n] = 0.0;
    state
}

/// Builds the semi-discrete curl system on `[E; H]`. The conducting-wall
/// condition is realized by zeroing the boundary electric rows of the
/// operator output, which keeps the map linear and time-invariant.
pub fn build(spec: &MaxwellSpec) -> Result<LinearSystem> {
    spec.validate()?;
    let n = spec.nx;
    let dx = spec.dx();
    let (eps0, mu0) = (spec.eps0, spec.mu0);
    let inv_eps_dx = 1.0 / (eps0 * dx);
    let inv_mu_dx = 1.0 / (mu0 * dx);

    Ok(LinearSystem::new(
        2 * (n + 1),
        move |state, out| {
            let (e, h) = state.split_at(n + 1);
            let (out_e, out_h) = out.split_at_mut(n + 1);
            out_e[0] = 0.0;
            for j in 1..n {
                out_e[j] = (h[j] - h[j - 1]) * inv_eps_dx;
            }
            out_e[n] = 0.0;
            for j in 0..n {
                out_h[j] = (e[j + 1] - e[j]) * inv_mu_dx;
            }
            out_h[n] = -e[n] * inv_mu_dx;
        },
        move |state| {
            let (e, h) = state.split_at(n + 1);
            let electric: f64 = e.iter().map(|x| x * x).sum();
            let magnetic: f64 = h.iter().map(|x| x * x).sum();
            0.5 * (eps0 * electric + mu0 * magnetic)
        },
    )
    .with_norm_bound(spec.norm_bound()))
}

/// One leapfrog run: energies recorded at step 0, every `record_every`
/// steps, and the final step.
#[derive(Debug, Clone)]
pub struct FdtdRecord {
    pub dt: f64,
    pub steps: Vec<u64>,
    pub times: Vec<f64>,
    /// Field energy with the magnetic half-step samples averaged onto
    /// integer times.
    pub energies: Vec<f64>,
    /// The staggered invariant
    /// `0.5 (eps0 ||E^n||^2 + mu0 <H^{n-1/2}, H^{n+1/2}>)`,
    /// conserved exactly by the scheme.
    pub staggered_energies: Vec<f64>,
    pub final_e: Vec<f64>,
    /// Magnetic field at the trailing half step.
    pub final_h: Vec<f64>,
}

impl FdtdRecord {
    pub fn initial_staggered(&self) -> f64 {
        self.staggered_energies[0]
    }

    pub fn final_staggered(&self) -> f64 {
        *self.staggered_energies.last().unwrap()
    }
}

/// Standard Yee leapfrog with the magnetic field staggered half a step in
/// time. `H^{1/2}` is produced from `H(0) = 0` by a half step of the
/// semi-discrete magnetic equation using `E(0)`; the Courant number is
/// `c dt / dx` and must not exceed 1.
pub fn fdtd_run(
    spec: &MaxwellSpec,
    courant: f64,
    n_steps: usize,
    record_every: usize,
) -> Result<FdtdRecord> {
    spec.validate()?;
    if !(courant > 0.0 && courant <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "Courant number must lie in (0, 1], got {courant}"
        )));
    }
    if n_steps == 0 {
        return Err(Error::InvalidSpec("n_steps must be >= 1".into()));
    }
    if record_every == 0 {
        return Err(Error::InvalidSpec("record_every must be >= 1".into()));
    }

    let n = spec.nx;
    let dx = spec.dx();
    let dt = courant * dx / spec.light_speed();
    let ce = dt / (spec.eps0 * dx);
    let ch = dt / (spec.mu0 * dx);

    let state = initial_state(spec);
    let mut e = state[..n + 1].to_vec();
    // Half step for the magnetic field; H^{-1/2} is its mirror image.
    let mut h: Vec<f64> = (0..=n)
        .map(|j| {
            if j < n {
                0.5 * ch * (e[j + 1] - e[j])
            } else {
                -0.5 * ch * e[n]
            }
        })
        .collect();
    let h_prev: Vec<f64> = h.iter().map(|x| -x).collect();

    let electric_energy = |e: &[f64]| -> f64 { e.iter().map(|x| x * x).sum::<f64>() * spec.eps0 };
    let staggered = |e: &[f64], hm: &[f64], hp: &[f64]| -> f64 {
        let cross: f64 = hm.iter().zip(hp).map(|(a, b)| a * b).sum();
        0.5 * (electric_energy(e) + spec.mu0 * cross)
    };
    let plain = |e: &[f64], hm: &[f64], hp: &[f64]| -> f64 {
        let avg: f64 = hm
            .iter()
            .zip(hp)
            .map(|(a, b)| {
                let mid = 0.5 * (a + b);
                mid * mid
            })
            .sum();
        0.5 * (electric_energy(e) + spec.mu0 * avg)
    };

    let mut steps = vec![0u64];
    let mut times = vec![0.0];
    let mut staggered_energies = vec![staggered(&e, &h_prev, &h)];
    let mut energies = vec![plain(&e, &h_prev, &h)];

    let mut h_next = vec![0.0; n + 1];
    for step in 1..=n_steps {
        for j in 1..n {
            e[j] += ce * (h[j] - h[j - 1]);
        }
        for j in 0..n {
            h_next[j] = h[j] + ch * (e[j + 1] - e[j]);
        }
        h_next[n] = h[n] - ch * e[n];
        if step % record_every == 0 || step == n_steps {
            steps.push(step as u64);
            times.push(step as f64 * dt);
            staggered_energies.push(staggered(&e, &h, &h_next));
            energies.push(plain(&e, &h, &h_next));
        }
        std::mem::swap(&mut h, &mut h_next);
    }

    Ok(FdtdRecord {
        dt,
        steps,
        times,
        energies,
        staggered_energies,
        final_e: e,
        final_h: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_matches_pulse_at_t0() {
        let spec = MaxwellSpec::pulse_cavity(64);
        let e = exact_e(&spec, 0.0);
        for (j, &x) in e_nodes(&spec).iter().enumerate() {
            assert!((e[j] - pulse(&spec, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn curl_blocks_match_bidiagonal_stencil() {
        // Reconstruct the operator blocks by probing with unit vectors and
        // compare with the (nx + 1)-square bidiagonal curl: +1 on the
        // diagonal, -1 on the subdiagonal, scaled by 1/dx.
        let spec = MaxwellSpec {
            t_final: 1e-12,
            ..MaxwellSpec::pulse_cavity(4)
        };
        let sys = build(&spec).unwrap();
        let n = spec.nx;
        let dx = spec.dx();
        let dim = 2 * (n + 1);

        let mut curl = vec![vec![0.0; n + 1]; n + 1];
        for (j, row) in curl.iter_mut().enumerate() {
            row[j] = 1.0 / dx;
            if j > 0 {
                row[j - 1] = -1.0 / dx;
            }
        }

        // Magnetic rows are -C^T / mu0: probe with electric unit vectors.
        for col in 0..=n {
            let mut probe = vec![0.0; dim];
            probe[col] = 1.0;
            let mut out = vec![0.0; dim];
            sys.apply_l(&probe, &mut out);
            for row in 0..=n {
                let expected = -curl[col][row] / spec.mu0;
                assert!(
                    (out[n + 1 + row] - expected).abs() < 1e-12 * (1.0 / dx / spec.mu0),
                    "row {row}, col {col}"
                );
            }
        }

        // Electric rows are C / eps0 with the boundary rows pinned.
        for col in 0..=n {
            let mut probe = vec![0.0; dim];
            probe[n + 1 + col] = 1.0;
            let mut out = vec![0.0; dim];
            sys.apply_l(&probe, &mut out);
            for row in 0..=n {
                let expected = if row == 0 || row == n {
                    0.0
                } else {
                    curl[row][col] / spec.eps0
                };
                assert!(
                    (out[row] - expected).abs() < 1e-12 * (1.0 / dx / spec.eps0),
                    "row {row}, col {col}"
                );
            }
        }
    }

    #[test]
    fn probes_pass() {
        let spec = MaxwellSpec::pulse_cavity(32);
        let sys = build(&spec).unwrap();
        assert!(sys.linearity_defect(17) < 1e-12);
        assert!(sys.antisymmetry_defect(19, 1e-4) < 3e-4);
    }

    #[test]
    fn fdtd_zero_fields_stay_zero() {
        let mut spec = MaxwellSpec::pulse_cavity(16);
        // Zero the pulse by moving the carrier out of range: directly run
        // with a handcrafted zero state instead.
        spec.t_final = 1e-12;
        let record = fdtd_run(&spec, 1.0, 1, 1).unwrap();
        // The run starts from the pulse; emulate zero fields by scaling:
        // linearity of the update means zero input gives zero output, which
        // we check through the invariant below on a zero pulse spec.
        assert!(record.final_e.iter().all(|x| x.is_finite()));

        // Direct zero-field check.
        let n = spec.nx;
        let e = vec![0.0; n + 1];
        let h = vec![0.0; n + 1];
        let mut e2 = e.clone();
        let mut h2 = h.clone();
        let ce = record.dt / (spec.eps0 * spec.dx());
        let ch = record.dt / (spec.mu0 * spec.dx());
        for j in 1..n {
            e2[j] += ce * (h[j] - h[j - 1]);
        }
        for j in 0..n {
            h2[j] = h[j] + ch * (e2[j + 1] - e2[j]);
        }
        assert!(e2.iter().all(|&x| x == 0.0));
        assert!(h2.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn fdtd_rejects_unstable_courant() {
        let spec = MaxwellSpec::pulse_cavity(32);
        assert!(fdtd_run(&spec, 1.2, 10, 1).is_err());
        assert!(fdtd_run(&spec, 0.0, 10, 1).is_err());
    }

    #[test]
    fn staggered_energy_conserved_at_desk_scale() {
        let spec = MaxwellSpec::pulse_cavity(2000);
        let c = spec.light_speed();
        let dt = spec.dx() / c;
        let n_steps = (spec.t_final / dt).round() as usize;
        let record = fdtd_run(&spec, 1.0, n_steps, n_steps).unwrap();
        let e0 = record.initial_staggered();
        let drift = (record.final_staggered() - e0).abs() / e0.abs();
        assert!(drift < 1e-13, "staggered drift {drift:e}");
    }

    #[test]
    fn spec_guards() {
        let mut spec = MaxwellSpec::pulse_cavity(2);
        assert!(build(&spec).is_err());
        spec = MaxwellSpec::pulse_cavity(32);
        spec.t_final = 1.0;
        assert!(build(&spec).is_err());
    }
}
