//! Linear nonlocal wave equation on a periodic bar.
//!
//! The displacement obeys `rho u_tt(x) = integral C(x'-x) (u(x') - u(x)) dx'`
//! with a truncated Gaussian kernel. Midpoint quadrature on cell centers
//! turns the integral into a dense coupling matrix `A` with zero row sums;
//! the first-order system on `[U; V]` is antisymmetric with energy
//! `0.5 V'V + 0.5 U'AU` (a seminorm: constants are in the kernel of `A`).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integrate::LinearSystem;

#[derive(Debug, Clone, Copy)]
pub struct PeridynamicsSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Cell count.
    pub nx: usize,
    /// Interaction radius of the kernel.
    pub horizon: f64,
    pub density: f64,
    pub t_final: f64,
}

impl PeridynamicsSpec {
    /// The benchmark bar: domain [-20, 20], horizon 5, unit density,
    /// integrated to t = 5 with a Gaussian initial displacement at rest.
    pub fn bar(nx: usize) -> Self {
        Self {
            x_lo: -20.0,
            x_hi: 20.0,
            nx,
            horizon: 5.0,
            density: 1.0,
            t_final: 5.0,
        }
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.nx as f64
    }

    pub fn domain_length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 {
            return Err(Error::InvalidSpec("need at least 2 cells".into()));
        }
        if !(self.dx() > 0.0) {
            return Err(Error::InvalidSpec("domain must have positive width".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidSpec("horizon must be positive".into()));
        }
        if self.horizon > 0.5 * self.domain_length() {
            return Err(Error::InvalidSpec(
                "horizon exceeds half the domain; periodic image ambiguous".into(),
            ));
        }
        if !(self.density > 0.0) {
            return Err(Error::InvalidSpec("density must be positive".into()));
        }
        Ok(())
    }
}

/// Truncated Gaussian kernel `(4/sqrt(pi)) exp(-d^2)` for `|d| < horizon`.
pub fn micromodulus(distance: f64, horizon: f64) -> f64 {
    if distance.abs() < horizon {
        4.0 / std::f64::consts::PI.sqrt() * (-distance * distance).exp()
    } else {
        0.0
    }
}

/// Cell centers `x_i = x_lo + (i - 1/2) dx`, `i = 1..nx`.
pub fn cell_centers(spec: &PeridynamicsSpec) -> Vec<f64> {
    let dx = spec.dx();
    (0..spec.nx)
        .map(|i| spec.x_lo + (i as f64 + 0.5) * dx)
        .collect()
}

/// Dense coupling matrix (row-major `nx * nx`): off-diagonal entries
/// `-(dx/rho) C(d_ij)` with the periodic minimal-image distance, diagonal
/// the negated row sum of the off-diagonals.
pub fn coupling_matrix(spec: &PeridynamicsSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.nx;
    let dx = spec.dx();
    let length = spec.domain_length();
    let scale = dx / spec.density;
    let centers = cell_centers(spec);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let raw = (centers[j] - centers[i]).abs();
            let dist = raw.min(length - raw);
            let kernel = micromodulus(dist, spec.horizon);
            a[i * n + j] = -scale * kernel;
            diag += scale * kernel;
        }
        a[i * n + i] = diag;
    }
    Ok(a)
}

/// Gaussian displacement at rest: `U_i = exp(-x_i^2)`, `V = 0`.
pub fn initial_state(spec: &PeridynamicsSpec) -> Vec<f64> {
    let n = spec.nx;
    let mut u = vec![0.0; 2 * n];
    for (i, &x) in cell_centers(spec).iter().enumerate() {
        u[i] = (-x * x).exp();
    }
    u
}

/// Builds the first-order system on `[U; V]`:
/// `d/dt [U; V] = [V; -A U]`, energy `0.5 V'V + 0.5 U'AU`.
pub fn build(spec: &PeridynamicsSpec) -> Result<LinearSystem> {
    let n = spec.nx;
    let matrix = Arc::new(coupling_matrix(spec)?);
    let apply_matrix = matrix.clone();
    let energy_matrix = matrix;

    // Gershgorin: lambda_max(A) <= 2 max_i A_ii, and the operator norm in
    // the energy seminorm is sqrt(lambda_max(A)).
    let max_diag = (0..n)
        .map(|i| apply_matrix[i * n + i])
        .fold(0.0_f64, f64::max);

    Ok(LinearSystem::new(
        2 * n,
        move |state, out| {
            let (u, v) = state.split_at(n);
            out[..n].copy_from_slice(v);
            for i in 0..n {
                let row = &apply_matrix[i * n..(i + 1) * n];
                let mut acc = 0.0;
                for j in 0..n {
                    acc += row[j] * u[j];
                }
                out[n + i] = -acc;
            }
        },
        move |state| {
            let (u, v) = state.split_at(n);
            let kinetic: f64 = v.iter().map(|x| x * x).sum();
            let mut elastic = 0.0;
            for i in 0..n {
                let row = &energy_matrix[i * n..(i + 1) * n];
                let mut acc = 0.0;
                for j in 0..n {
                    acc += row[j] * u[j];
                }
                elastic += u[i] * acc;
            }
            0.5 * (kinetic + elastic)
        },
    )
    .with_norm_bound((2.0 * max_diag).sqrt()))
}

/// Upper integration limit: the integrand tail beyond 8 is below
/// exp(-64).
const XI_MAX: f64 = 8.0;
/// Panel budget for the adaptive quadrature.
const MAX_PANELS: usize = 4096;

/// Closed-form solution of the infinite-bar problem for the Gaussian
/// initial condition:
///
/// `u(x,t) = (2/sqrt(pi)) * integral_0^inf exp(-xi^2) cos(2 x xi)
///            cos(2 t sqrt(1 - exp(-xi^2))) d xi`,
///
/// evaluated by adaptive Gauss-Kronrod quadrature to absolute accuracy
/// `quad_tol`.
pub fn exact_displacement(x: f64, t: f64, quad_tol: f64) -> Result<f64> {
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidSpec(
            "quadrature tolerance must be positive".into(),
        ));
    }
    let f = move |xi: f64| {
        let gauss = (-xi * xi).exp();
        let dispersion = (1.0 - gauss).max(0.0).sqrt();
        gauss * (2.0 * x * xi).cos() * (2.0 * t * dispersion).cos()
    };
    let (value, achieved) = adaptive_gk(&f, 0.0, XI_MAX, quad_tol);
    if achieved > quad_tol {
        return Err(Error::QuadratureTolerance {
            requested: quad_tol,
            achieved,
            value: value * 2.0 / std::f64::consts::PI.sqrt(),
        });
    }
    Ok(value * 2.0 / std::f64::consts::PI.sqrt())
}

/// Exact displacement sampled at the cell centers.
pub fn exact_profile(spec: &PeridynamicsSpec, t: f64, quad_tol: f64) -> Result<Vec<f64>> {
    cell_centers(spec)
        .iter()
        .map(|&x| exact_displacement(x, t, quad_tol))
        .collect()
}

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 15(7) panel: returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for j in 0..7 {
        let offset = half * XGK[j];
        let sum = f(center - offset) + f(center + offset);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Worst-interval-first bisection within a panel budget; returns
/// (value, achieved error bound).
fn adaptive_gk<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut panels = vec![{
        let (value, err) = gk15(f, a, b);
        (err, value, a, b)
    }];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.0).sum();
        if total_err <= tol || panels.len() >= MAX_PANELS {
            let total: f64 = panels.iter().map(|p| p.1).sum();
            return (total, total_err);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .map(|(i, _)| i)
            .unwrap();
        let (_, _, lo, hi) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        // An interval too narrow to split means round-off has won.
        if !(lo < mid && mid < hi) {
            let (value, err) = gk15(f, lo, hi);
            panels.push((err, value, lo, hi));
            let total: f64 = panels.iter().map(|p| p.1).sum();
            let total_err: f64 = panels.iter().map(|p| p.0).sum();
            return (total, total_err);
        }
        let (lv, le) = gk15(f, lo, mid);
        let (rv, re) = gk15(f, mid, hi);
        panels.push((le, lv, lo, mid));
        panels.push((re, rv, mid, hi));
    }
}
