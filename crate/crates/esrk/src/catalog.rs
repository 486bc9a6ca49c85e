//! Named method construction and numeric re-derivation of
//! energy-superconvergent coefficient sets.
//!
//! Methods are labelled `RK(s,p,r)` by stage count, solution order, and
//! energy order, with `-a`/`-b` suffixes distinguishing branches of the
//! same `(s,p,r)` triple. The catalog carries closed-form coefficients;
//! [`solve_esc`] re-derives them independently by zeroing the interior
//! energy coefficients with a damped Newton iteration from many seeds.

use crate::coeffs::{
    energy_coefficients_raw, solution_order, EnergyProfile, RkCoefficients, TAYLOR_MATCH_TOL,
};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A named method: coefficients plus the derived energy profile, with the
/// `(s, p, r)` triple in the name validated against recomputation.
#[derive(Debug, Clone)]
pub struct MethodDescriptor {
    name: String,
    coefficients: RkCoefficients,
    profile: EnergyProfile,
}

impl MethodDescriptor {
    /// Builds a descriptor, recomputing the profile and rejecting names
    /// whose `(s, p, r)` triple disagrees with the coefficients.
    pub fn new(name: impl Into<String>, coefficients: RkCoefficients) -> Result<Self> {
        let name = name.into();
        let profile = EnergyProfile::of(&coefficients)?;
        let expected = format!(
            "RK({},{},{})",
            coefficients.stages(),
            profile.solution_order,
            profile.energy_order
        );
        let suffix = name.strip_prefix(&expected);
        let suffix_ok = matches!(suffix, Some("") | Some("-a") | Some("-b"));
        if !suffix_ok {
            return Err(Error::InvalidCoefficients(format!(
                "name {name:?} does not match recomputed triple {expected}"
            )));
        }
        Ok(Self {
            name,
            coefficients,
            profile,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self) -> &RkCoefficients {
        &self.coefficients
    }

    pub fn profile(&self) -> &EnergyProfile {
        &self.profile
    }

    pub fn stages(&self) -> usize {
        self.coefficients.stages()
    }

    pub fn solution_order(&self) -> usize {
        self.profile.solution_order
    }

    pub fn energy_order(&self) -> usize {
        self.profile.energy_order
    }

    /// Strong-stability bound on `h * ||L||`, when the method has one.
    pub fn stability_bound(&self) -> Option<f64> {
        self.profile.stability_bound
    }
}

fn inv_factorial(k: usize) -> f64 {
    let mut x = 1.0;
    for i in 1..=k {
        x /= i as f64;
    }
    x
}

/// Truncated-exponential coefficients `a_k = 1/k!`, `k = 0..s`, giving the
/// order-`s` one-step method.
pub fn taylor_method(s: usize) -> Result<RkCoefficients> {
    if s < 1 {
        return Err(Error::InvalidSpec("stage count must be >= 1".into()));
    }
    RkCoefficients::new((0..=s).map(inv_factorial).collect())
}

/// Family with solution order one below the stage count: for odd `s > 1`,
/// `a_k = 1/k!` up to `s - 1` and `a_s = 1/s! - 1/(s+1)!`, which raises the
/// energy order to `s + 2`.
pub fn family_one_below(s: usize) -> Result<RkCoefficients> {
    if s <= 1 || s.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "family requires odd s > 1, got {s}"
        )));
    }
    let mut a: Vec<f64> = (0..s).map(inv_factorial).collect();
    a.push(inv_factorial(s) - inv_factorial(s + 1));
    RkCoefficients::new(a)
}

/// Family with solution order two below the stage count: for even `s > 4`,
/// `a_k = 1/k!` up to `s - 2` and the last two coefficients shifted by
/// `3/(s+2)! - 3/(s+1)!`, which raises the energy order to `s + 3`.
pub fn family_two_below(s: usize) -> Result<RkCoefficients> {
    if s <= 4 || s % 2 == 1 {
        return Err(Error::InvalidSpec(format!(
            "family requires even s > 4, got {s}"
        )));
    }
    let shift = 3.0 * inv_factorial(s + 2) - 3.0 * inv_factorial(s + 1);
    let mut a: Vec<f64> = (0..=s - 2).map(inv_factorial).collect();
    a.push(shift + inv_factorial(s - 1));
    a.push(shift + inv_factorial(s));
    RkCoefficients::new(a)
}

/// All nine named methods with closed-form coefficients. Every entry is
/// validated at construction (name triple recomputed from scratch).
pub fn catalog() -> Vec<MethodDescriptor> {
    let rt2 = 2f64.sqrt();
    let rt5 = 5f64.sqrt();
    let rt10 = 10f64.sqrt();

    let entries: Vec<(&str, Vec<f64>)> = vec![
        ("RK(3,2,5)", vec![1.0, 1.0, 0.5, 0.125]),
        (
            "RK(4,2,7)-a",
            vec![1.0, 1.0, 0.5, (2.0 - rt2) / 4.0, (3.0 - 2.0 * rt2) / 8.0],
        ),
        (
            "RK(4,2,7)-b",
            vec![1.0, 1.0, 0.5, (2.0 + rt2) / 4.0, (3.0 + 2.0 * rt2) / 8.0],
        ),
        (
            "RK(5,2,9)-a",
            vec![
                1.0,
                1.0,
                0.5,
                (rt5 - 1.0) / 8.0,
                (rt5 - 2.0) / 8.0,
                (rt5 - 2.0) * (rt5 - 2.0) / (16.0 * (rt5 - 1.0)),
            ],
        ),
        ("RK(5,2,9)-b", vec![1.0, 1.0, 0.5, 0.25, 0.125, 1.0 / 32.0]),
        ("RK(4,4,5)", vec![1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0]),
        (
            "RK(5,4,7)",
            vec![1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 144.0],
        ),
        (
            "RK(6,4,9)",
            vec![
                1.0,
                1.0,
                0.5,
                1.0 / 6.0,
                1.0 / 24.0,
                1.0 / 128.0,
                1.0 / 1152.0,
            ],
        ),
        (
            "RK(7,4,11)",
            vec![
                1.0,
                1.0,
                0.5,
                1.0 / 6.0,
                1.0 / 24.0,
                (rt10 - 2.0) / 144.0,
                (rt10 - 3.0) / 144.0,
                (8.0 * rt10 - 25.0) / 3456.0,
            ],
        ),
    ];

    entries
        .into_iter()
        .map(|(name, a)| {
            let coeffs = RkCoefficients::named(a, name).expect("catalog coefficients valid");
            MethodDescriptor::new(name, coeffs).expect("catalog method self-consistent")
        })
        .collect()
}

/// Looks a method up by its catalog name.
pub fn lookup(name: &str) -> Option<MethodDescriptor> {
    catalog().into_iter().find(|m| m.name() == name)
}

/// Outcome of an ESC root search.
#[derive(Debug, Clone)]
pub struct EscSolveReport {
    /// Distinct converged roots, sorted by the first free coefficient.
    pub roots: Vec<RkCoefficients>,
    pub seeds_tried: usize,
    pub seeds_converged: usize,
}

const NEWTON_RESIDUAL_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 40;
const ROOT_DEDUP_DISTANCE: f64 = 1e-9;

/// Numerically re-derives energy-superconvergent coefficients: fixes
/// `a_k = 1/k!` for `k <= p` and solves the square system `b_k = 0` for
/// `k = p/2+1 .. s-p/2` in the free coefficients `a_{p+1}..a_s`, from
/// `random_seeds` scattered starts plus the truncated-exponential seed.
/// Every returned root attains energy order `2s - p + 1`.
pub fn solve_esc(s: usize, p: usize, random_seeds: usize) -> Result<EscSolveReport> {
    if p < 2 || !p.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "solution order must be even and >= 2, got {p}"
        )));
    }
    if !(p < s && s <= p + 3) {
        return Err(Error::InvalidSpec(format!(
            "stage count must satisfy p < s <= p + 3, got s = {s}, p = {p}"
        )));
    }

    let unknowns = s - p;
    let mut rng = SplitMix64::new(0x00E5_C0DE ^ ((s as u64) << 8) ^ p as u64);
    let mut seeds: Vec<Vec<f64>> = Vec::with_capacity(random_seeds + 17);
    // Deterministic seeds: the truncated exponential, plus a coarse sign
    // lattice at two magnitudes so every orthant holds a start (the
    // log-uniform draw alone rarely lands in basins with O(1) roots).
    seeds.push((p + 1..=s).map(inv_factorial).collect());
    for &magnitude in &[0.75, 0.1] {
        for pattern in 0..(1u32 << unknowns.min(4)) {
            seeds.push(
                (0..unknowns)
                    .map(|bit| {
                        if pattern >> (bit.min(3)) & 1 == 0 {
                            magnitude
                        } else {
                            -magnitude
                        }
                    })
                    .collect(),
            );
        }
    }
    for _ in 0..random_seeds {
        seeds.push(
            (0..unknowns)
                .map(|_| {
                    // Log-uniform magnitude in [1e-6, 1], either sign.
                    let mag = 10f64.powf(-6.0 * rng.next_f64());
                    if rng.next_u64() & 1 == 0 {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect(),
        );
    }

    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut converged = 0;
    for seed in &seeds {
        if let Some(root) = newton_root(s, p, seed) {
            converged += 1;
            let duplicate = roots.iter().any(|r| {
                r.iter()
                    .zip(&root)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
                    < ROOT_DEDUP_DISTANCE
            });
            if !duplicate {
                roots.push(root);
            }
        }
    }
    roots.sort_by(|a, b| a[0].total_cmp(&b[0]));

    let target_r = 2 * s - p + 1;
    let mut out = Vec::new();
    for root in roots {
        let mut a: Vec<f64> = (0..=p).map(inv_factorial).collect();
        a.extend_from_slice(&root);
        let Ok(c) = RkCoefficients::new(a) else {
            continue;
        };
        let Ok(profile) = EnergyProfile::of(&c) else {
            continue;
        };
        if profile.energy_order == target_r && solution_order(&c, TAYLOR_MATCH_TOL) >= p {
            out.push(c);
        }
    }

    Ok(EscSolveReport {
        roots: out,
        seeds_tried: seeds.len(),
        seeds_converged: converged,
    })
}

/// Residual of the targeted energy coefficients at free coefficients `x`.
fn esc_residual(s: usize, p: usize, x: &[f64], out: &mut [f64]) {
    let mut a: Vec<f64> = (0..=p).map(inv_factorial).collect();
    a.extend_from_slice(x);
    let b = energy_coefficients_raw(&a);
    let lo = p / 2 + 1;
    let hi = s - p / 2;
    for (row, k) in (lo..=hi).enumerate() {
        out[row] = b[k - 1];
    }
}

/// Analytic Jacobian: d b_k / d a_j = 2 (-1)^{k+j} a_{2k-j} whenever
/// `0 <= 2k - j <= s`, zero otherwise.
fn esc_jacobian(s: usize, p: usize, x: &[f64], jac: &mut [f64]) {
    let n = s - p;
    let mut a: Vec<f64> = (0..=p).map(inv_factorial).collect();
    a.extend_from_slice(x);
    let lo = p / 2 + 1;
    for row in 0..n {
        let k = lo + row;
        for col in 0..n {
            let j = p + 1 + col;
            let value = if 2 * k >= j && 2 * k - j <= s {
                let sign = if (k + j).is_multiple_of(2) { 1.0 } else { -1.0 };
                2.0 * sign * a[2 * k - j]
            } else {
                0.0
            };
            jac[row * n + col] = value;
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(n: usize, a: &mut [f64], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let scale = a
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot_row * n + col].abs() < 1e-14 * scale {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Damped Newton iteration on the interior energy coefficients.
fn newton_root(s: usize, p: usize, seed: &[f64]) -> Option<Vec<f64>> {
    let n = s - p;
    let mut x = seed.to_vec();
    let mut residual = vec![0.0; n];
    let mut jac = vec![0.0; n * n];
    esc_residual(s, p, &x, &mut residual);
    let mut norm = inf_norm(&residual);

    for _ in 0..NEWTON_MAX_ITER {
        if norm < NEWTON_RESIDUAL_TOL {
            return x.iter().all(|v| v.is_finite()).then_some(x);
        }
        esc_jacobian(s, p, &x, &mut jac);
        let mut lhs = jac.clone();
        let mut rhs = residual.clone();
        let delta = solve_dense(n, &mut lhs, &mut rhs)?;

        // Backtrack until the residual actually shrinks.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi - step * d).collect();
            let mut trial_res = vec![0.0; n];
            esc_residual(s, p, &trial, &mut trial_res);
            let trial_norm = inf_norm(&trial_res);
            if trial_norm.is_finite() && trial_norm < norm {
                x = trial;
                residual = trial_res;
                norm = trial_norm;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    (norm < NEWTON_RESIDUAL_TOL && x.iter().all(|v| v.is_finite())).then_some(x)
}
