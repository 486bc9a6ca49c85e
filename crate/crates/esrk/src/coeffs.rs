//! Algebra of explicit Runge-Kutta methods in monomial form.
//!
//! Applied to an autonomous linear system `u' = Lu`, an explicit `s`-stage
//! RK method reduces to `u_{n+1} = G(hL) u_n` with the amplification
//! polynomial `G(z) = sum_{k=0..s} a_k z^k`, `a_0 = 1`, `a_s != 0`. When
//! `L` is antisymmetric in some inner product, the per-step energy update
//! is governed by the derived coefficients
//!
//! ```text
//! b_k = a_k^2 + 2 * sum_{i=1..min(k, s-k)} (-1)^i a_{k-i} a_{k+i},
//! ```
//!
//! whose leading nonzero index `m` fixes the energy convergence order
//! `r = 2m - 1`, and whose tail fixes the strong-stability step bound
//! `lambda = sqrt(-b_{s-1}/b_s)` when the interior coefficients vanish.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance below which the last coefficient counts as zero.
pub const COEFF_ABS_TOL: f64 = 1e-15;

/// Relative threshold (against `max_k |b_k|`) separating true zeros of the
/// energy coefficients from genuinely small leading entries. True zeros of
/// the closed-form methods land near 1e-17 in f64 while the smallest real
/// leading coefficient in the catalog is ~1.2e-7, so 1e-9 sits far from
/// both.
pub const ENERGY_ZERO_TOL: f64 = 1e-9;

/// Absolute tolerance for matching a coefficient to the Taylor value
/// `1/k!` when determining the solution order.
pub const TAYLOR_MATCH_TOL: f64 = 1e-12;

/// Monomial coefficients `a_0..a_s` of an explicit RK stability polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RkCoefficients {
    coeffs: Vec<f64>,
    name: Option<String>,
}

impl RkCoefficients {
    /// Builds a coefficient set, enforcing `a_0 = 1` exactly and
    /// `|a_s| > COEFF_ABS_TOL`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidCoefficients(
                "need at least a_0 and a_1".into(),
            ));
        }
        if coeffs[0] != 1.0 {
            return Err(Error::InvalidCoefficients(format!(
                "a_0 must be exactly 1, got {:e}",
                coeffs[0]
            )));
        }
        let last = *coeffs.last().unwrap();
        if !last.is_finite() || last.abs() <= COEFF_ABS_TOL {
            return Err(Error::InvalidCoefficients(format!(
                "a_s must be nonzero, got {last:e}"
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite entry".into()));
        }
        Ok(Self { coeffs, name: None })
    }

    /// Same as [`RkCoefficients::new`] with a label attached.
    pub fn named(coeffs: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        let mut c = Self::new(coeffs)?;
        c.name = Some(name.into());
        Ok(c)
    }

    /// Stage count `s`.
    pub fn stages(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The coefficients `a_0..a_s` (length `s + 1`).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }
}

/// Energy behaviour of a method: derived coefficients, orders, and the
/// strong-stability bound when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    /// Energy-update coefficients `b_1..b_s` (length `s`).
    pub coefficients: Vec<f64>,
    /// Smallest 1-based index with a nonzero coefficient.
    pub leading_index: usize,
    /// Energy convergence order `r = 2m - 1`.
    pub energy_order: usize,
    /// Solution convergence order `p`.
    pub solution_order: usize,
    /// Strong-stability bound on `h * ||L||`; present iff the method is
    /// strongly stable.
    pub stability_bound: Option<f64>,
    pub strongly_stable: bool,
}

impl EnergyProfile {
    /// Derives the full profile of a coefficient set using the default
    /// tolerances.
    pub fn of(c: &RkCoefficients) -> Result<Self> {
        let b = energy_coefficients(c);
        let (m, r) = leading_index(&b, ENERGY_ZERO_TOL)?;
        let p = solution_order(c, TAYLOR_MATCH_TOL);
        let bound = strong_stability_bound(c, ENERGY_ZERO_TOL).ok().map(|x| x.0);
        Ok(Self {
            coefficients: b,
            leading_index: m,
            energy_order: r,
            solution_order: p,
            strongly_stable: bound.is_some(),
            stability_bound: bound,
        })
    }
}

/// Energy coefficients `b_1..b_s` from a raw coefficient slice `a_0..a_s`.
///
/// Shared by the validated public entry point and the root solver, which
/// probes unvalidated iterates.
pub(crate) fn energy_coefficients_raw(a: &[f64]) -> Vec<f64> {
    let s = a.len() - 1;
    (1..=s)
        .map(|k| {
            let mut b = a[k] * a[k];
            for i in 1..=k.min(s - k) {
                let term = 2.0 * a[k - i] * a[k + i];
                if i % 2 == 1 {
                    b -= term;
                } else {
                    b += term;
                }
            }
            b
        })
        .collect()
}

/// Energy-update coefficients `b_1..b_s` of a method.
pub fn energy_coefficients(c: &RkCoefficients) -> Vec<f64> {
    energy_coefficients_raw(c.coeffs())
}

/// Leading index `m` (1-based, smallest `k` with `|b_k| > tol * max|b|`)
/// and the energy order `r = 2m - 1`.
pub fn leading_index(b: &[f64], tol: f64) -> Result<(usize, usize)> {
    if b.is_empty() {
        return Err(Error::AllZeroEnergyCoefficients);
    }
    let max = b.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return Err(Error::AllZeroEnergyCoefficients);
    }
    let threshold = tol * max;
    for (idx, value) in b.iter().enumerate() {
        if value.abs() > threshold {
            let m = idx + 1;
            return Ok((m, 2 * m - 1));
        }
    }
    Err(Error::AllZeroEnergyCoefficients)
}

/// Largest `p <= s` with `|a_k - 1/k!| <= tol` for all `k <= p`.
pub fn solution_order(c: &RkCoefficients, tol: f64) -> usize {
    let mut inv_factorial = 1.0;
    let mut p = 0;
    for (k, &coeff) in c.coeffs().iter().enumerate().skip(1) {
        inv_factorial /= k as f64;
        if (coeff - inv_factorial).abs() <= tol {
            p = k;
        } else {
            break;
        }
    }
    p
}

/// Stage multipliers `c_j = a_{s-j+1} / a_{s-j}` realizing the method as
/// `s` nested operator applications. Requires every coefficient nonzero.
pub fn stage_ratios(c: &RkCoefficients) -> Result<Vec<f64>> {
    let a = c.coeffs();
    let s = c.stages();
    for (idx, value) in a.iter().enumerate() {
        if value.abs() <= COEFF_ABS_TOL {
            return Err(Error::DegenerateCoefficient { index: idx });
        }
    }
    Ok((1..=s).map(|j| a[s - j + 1] / a[s - j]).collect())
}

/// Strong-stability bound `lambda = sqrt(-b_{s-1}/b_s)` together with the
/// penultimate energy coefficient `b_{s-1}`.
///
/// Requires `b_k = 0` (relative to `max|b|`, within `tol`) for
/// `1 <= k <= s-2` and `b_{s-1} < 0`; otherwise the first offending
/// coefficient is reported.
pub fn strong_stability_bound(c: &RkCoefficients, tol: f64) -> Result<(f64, f64)> {
    let s = c.stages();
    let b = energy_coefficients(c);
    if s < 2 {
        return Err(Error::NotStronglyStable {
            index: s,
            value: b[s - 1],
        });
    }
    let max = b.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let threshold = tol * max;
    for k in 1..=s - 2 {
        if b[k - 1].abs() > threshold {
            return Err(Error::NotStronglyStable {
                index: k,
                value: b[k - 1],
            });
        }
    }
    let b_prev = b[s - 2];
    if b_prev >= -threshold {
        return Err(Error::NotStronglyStable {
            index: s - 1,
            value: b_prev,
        });
    }
    // b_s = a_s^2 > 0 always.
    let lambda = (-b_prev / b[s - 1]).sqrt();
    Ok((lambda, b_prev))
}

/// Evaluates the amplification polynomial `G(z) = sum a_k z^k` by Horner
/// recursion.
pub fn amplification(c: &RkCoefficients, z: Complex64) -> Complex64 {
    let a = c.coeffs();
    let mut acc = Complex64::new(*a.last().unwrap(), 0.0);
    for &coeff in a.iter().rev().skip(1) {
        acc = acc * z + coeff;
    }
    acc
}
