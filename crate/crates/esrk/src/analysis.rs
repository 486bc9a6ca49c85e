//! Error norms, convergence tables, stability-region scans, and energy
//! time-history fitting.

use num_complex::Complex64;

use crate::coeffs::{amplification, RkCoefficients};
use crate::error::{Error, Result};
use crate::integrate::SimulationRecord;

/// Round-off floor on |relative energy deviation| below which order
/// columns are left blank.
pub const ENERGY_ORDER_FLOOR: f64 = 5e-16;

/// Samples below this magnitude are excluded from log-log fits.
pub const DECAY_FIT_FLOOR: f64 = 1e-15;

/// Modulus slack for the imaginary-axis stability scan.
pub const MODULUS_SLACK: f64 = 1e-14;

/// Weighted error norms of a sampled error field:
/// `(spacing * sum |e|, spacing * sqrt(sum e^2), max |e|)`.
pub fn error_norms(errors: &[f64], spacing: f64) -> Result<(f64, f64, f64)> {
    if errors.is_empty() {
        return Err(Error::InvalidSpec("error field must be nonempty".into()));
    }
    if !(spacing > 0.0) {
        return Err(Error::InvalidSpec("spacing must be positive".into()));
    }
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut max = 0.0_f64;
    for &e in errors {
        abs_sum += e.abs();
        sq_sum += e * e;
        max = max.max(e.abs());
    }
    Ok((spacing * abs_sum, spacing * sq_sum.sqrt(), max))
}

/// Signed relative deviation `(e_t - e_0) / e_0`.
pub fn relative_energy_deviation(e0: f64, et: f64) -> Result<f64> {
    if e0 == 0.0 {
        return Err(Error::ZeroReferenceEnergy);
    }
    Ok((et - e0) / e0)
}

/// One resolution worth of error measurements.
#[derive(Debug, Clone, Copy)]
pub struct ResolutionErrors {
    /// Grid or step count.
    pub n: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub eps_inf: f64,
    /// Signed relative energy deviation.
    pub eps_e: f64,
}

/// A row of a convergence table: errors plus the orders derived from the
/// previous (half-resolution) row.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub errors: ResolutionErrors,
    pub order1: Option<f64>,
    pub order2: Option<f64>,
    pub order_inf: Option<f64>,
    pub order_e: Option<f64>,
}

/// Per-resolution error norms and derived orders, sorted by ascending
/// resolution with each row exactly twice the previous.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

fn pair_order(coarse: f64, fine: f64, floor: f64) -> Option<f64> {
    let (c, f) = (coarse.abs(), fine.abs());
    if f < floor || f == 0.0 || c == 0.0 {
        return None;
    }
    Some((c / f).log2())
}

/// Fills the order columns as log2 of consecutive error ratios. Rows must
/// be sorted with each resolution exactly double the previous. Energy
/// orders are left blank once the finer deviation sits below the
/// round-off floor.
pub fn convergence_orders(measurements: &[ResolutionErrors]) -> Result<ConvergenceTable> {
    for pair in measurements.windows(2) {
        if pair[1].n != 2 * pair[0].n {
            return Err(Error::NonDoublingResolutions {
                coarse: pair[0].n,
                fine: pair[1].n,
            });
        }
    }
    let mut rows = Vec::with_capacity(measurements.len());
    for (idx, m) in measurements.iter().enumerate() {
        let (order1, order2, order_inf, order_e) = if idx == 0 {
            (None, None, None, None)
        } else {
            let prev = &measurements[idx - 1];
            (
                pair_order(prev.eps1, m.eps1, 0.0),
                pair_order(prev.eps2, m.eps2, 0.0),
                pair_order(prev.eps_inf, m.eps_inf, 0.0),
                pair_order(prev.eps_e, m.eps_e, ENERGY_ORDER_FLOOR),
            )
        };
        rows.push(ConvergenceRow {
            errors: *m,
            order1,
            order2,
            order_inf,
            order_e,
        });
    }
    Ok(ConvergenceTable { rows })
}

/// Least-squares slope of `log2 |error|` against `log2 h` (with
/// `h ∝ 1/n`), skipping entries with `|error| < floor`. `None` when fewer
/// than two usable points remain.
pub fn fit_order(ns: &[usize], errors: &[f64], floor: f64) -> Option<f64> {
    let points: Vec<(f64, f64)> = ns
        .iter()
        .zip(errors)
        .filter(|(_, e)| e.abs() >= floor && e.abs() > 0.0)
        .map(|(&n, &e)| (-(n as f64).log2(), e.abs().log2()))
        .collect();
    least_squares_line(&points).map(|(slope, _)| slope)
}

fn least_squares_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some((slope, intercept))
}

/// Rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Window {
    /// Covers every catalog method's stability region with margin.
    fn default() -> Self {
        Self {
            re_min: -6.0,
            re_max: 1.0,
            im_min: -5.0,
            im_max: 5.0,
        }
    }
}

/// Amplification-modulus samples over a window plus the extracted
/// `|G| = 1` boundary points.
#[derive(Debug, Clone)]
pub struct StabilityRegion {
    pub window: Window,
    pub resolution: usize,
    /// Row-major `resolution x resolution` samples of |G|, imaginary part
    /// varying slowest.
    pub magnitudes: Vec<f64>,
    /// Boundary crossings ordered by angle around their centroid.
    pub boundary: Vec<(f64, f64)>,
}

/// Samples `|G|` on a uniform grid and extracts boundary points where the
/// modulus crosses 1 along grid lines (linear interpolation between
/// adjacent samples).
pub fn stability_region(
    c: &RkCoefficients,
    window: Window,
    resolution: usize,
) -> Result<StabilityRegion> {
    if resolution < 16 {
        return Err(Error::InvalidSpec("resolution must be at least 16".into()));
    }
    let nr = resolution;
    let res =
        |i: usize| window.re_min + (window.re_max - window.re_min) * i as f64 / (nr - 1) as f64;
    let ims =
        |i: usize| window.im_min + (window.im_max - window.im_min) * i as f64 / (nr - 1) as f64;

    let mut magnitudes = vec![0.0; nr * nr];
    for row in 0..nr {
        let im = ims(row);
        for col in 0..nr {
            let z = Complex64::new(res(col), im);
            magnitudes[row * nr + col] = amplification(c, z).norm();
        }
    }

    let mut boundary = Vec::new();
    let excess = |row: usize, col: usize| magnitudes[row * nr + col] - 1.0;
    for row in 0..nr {
        for col in 0..nr {
            let here = excess(row, col);
            // Horizontal edge.
            if col + 1 < nr {
                let right = excess(row, col + 1);
                if here == 0.0 {
                    boundary.push((res(col), ims(row)));
                } else if here * right < 0.0 {
                    let frac = here / (here - right);
                    boundary.push((res(col) + frac * (res(col + 1) - res(col)), ims(row)));
                }
            }
            // Vertical edge.
            if row + 1 < nr {
                let up = excess(row + 1, col);
                if here * up < 0.0 {
                    let frac = here / (here - up);
                    boundary.push((res(col), ims(row) + frac * (ims(row + 1) - ims(row))));
                }
            }
        }
    }

    if !boundary.is_empty() {
        let cx = boundary.iter().map(|p| p.0).sum::<f64>() / boundary.len() as f64;
        let cy = boundary.iter().map(|p| p.1).sum::<f64>() / boundary.len() as f64;
        boundary.sort_by(|a, b| {
            let ta = (a.1 - cy).atan2(a.0 - cx);
            let tb = (b.1 - cy).atan2(b.0 - cx);
            ta.total_cmp(&tb).then(a.0.total_cmp(&b.0))
        });
    }

    Ok(StabilityRegion {
        window,
        resolution,
        magnitudes,
        boundary,
    })
}

/// Largest `y* <= y_max` such that `|G(iy)| <= 1 + MODULUS_SLACK` on all
/// of `[0, y*]`, located by a grid scan plus bisection to width `tol`.
/// Returns 0 (up to `tol`) when the modulus exceeds the slack immediately
/// off the origin, and `y_max` when no crossing exists in range.
pub fn imaginary_axis_interval(c: &RkCoefficients, y_max: f64, tol: f64) -> f64 {
    if !(y_max > 0.0) {
        return 0.0;
    }
    let grid = 2048;
    let excess = |y: f64| amplification(c, Complex64::new(0.0, y)).norm() - 1.0 - MODULUS_SLACK;
    let mut lo = 0.0;
    let mut hi = y_max;
    let mut found = false;
    for i in 1..=grid {
        let y = y_max * i as f64 / grid as f64;
        if excess(y) > 0.0 {
            hi = y;
            found = true;
            break;
        }
        lo = y;
    }
    if !found {
        return y_max;
    }
    while hi - lo > tol.max(f64::EPSILON) {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Least-squares line through `(log10 t, log10 |eps_E|)` of a recorded
/// run, excluding the initial sample and samples at the round-off floor.
/// Returns `(slope, intercept)`.
pub fn energy_decay_fit(record: &SimulationRecord) -> Result<(f64, f64)> {
    let e0 = record.initial_energy();
    if e0 == 0.0 {
        return Err(Error::ZeroReferenceEnergy);
    }
    let mut points = Vec::new();
    let mut usable = 0;
    for (idx, &t) in record.times.iter().enumerate() {
        if t <= 0.0 {
            continue;
        }
        let dev = (record.energies[idx] - e0) / e0;
        if dev.abs() > 0.0 {
            usable += 1;
        }
        if dev.abs() >= DECAY_FIT_FLOOR {
            points.push((t.log10(), dev.abs().log10()));
        }
    }
    if usable < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            got: usable,
        });
    }
    if points.len() < 2 {
        return Err(Error::EnergyAtRoundoff);
    }
    least_squares_line(&points).ok_or(Error::EnergyAtRoundoff)
}
