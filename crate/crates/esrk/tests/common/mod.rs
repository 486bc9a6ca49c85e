//! Dense linear-algebra oracles shared by the integration test suites.
//! Everything here is deliberately independent of the library's
//! matrix-free code paths.

#![allow(dead_code)]

/// Dense row-major matrix-vector product.
pub fn matvec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
        .collect()
}

/// Applies the polynomial `sum_k c_k (h A)^k` to `x` through explicit
/// matrix powers.
pub fn polynomial_apply(n: usize, a: &[f64], coeffs: &[f64], h: f64, x: &[f64]) -> Vec<f64> {
    let mut acc: Vec<f64> = x.iter().map(|v| coeffs[0] * v).collect();
    let mut power = x.to_vec();
    for &c in &coeffs[1..] {
        power = matvec(n, a, &power);
        for v in power.iter_mut() {
            *v *= h;
        }
        for i in 0..n {
            acc[i] += c * power[i];
        }
    }
    acc
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(n: usize, matrix: &[f64]) -> Vec<f64> {
    let mut a = matrix.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Matrix exponential `exp(h A)` applied to `x` via scaling and squaring
/// of a high-order truncated series.
pub fn expm_apply(n: usize, a: &[f64], h: f64, x: &[f64]) -> Vec<f64> {
    // Scale so the series argument is tiny, square back up.
    let norm: f64 = (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scaled_h = h;
    while scaled_h.abs() * norm > 0.25 && squarings < 40 {
        scaled_h *= 0.5;
        squarings += 1;
    }
    // exp(scaled_h * A) as a dense matrix from a 20-term series.
    let mut exp_m = vec![0.0; n * n];
    for i in 0..n {
        exp_m[i * n + i] = 1.0;
    }
    let mut term = exp_m.clone();
    for k in 1..=20 {
        // term <- (scaled_h / k) * A * term
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let ail = a[i * n + l];
                if ail == 0.0 {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += ail * term[l * n + j];
                }
            }
        }
        let factor = scaled_h / k as f64;
        for v in next.iter_mut() {
            *v *= factor;
        }
        for i in 0..n * n {
            exp_m[i] += next[i];
        }
        term = next;
    }
    for _ in 0..squarings {
        let mut sq = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let ail = exp_m[i * n + l];
                if ail == 0.0 {
                    continue;
                }
                for j in 0..n {
                    sq[i * n + j] += ail * exp_m[l * n + j];
                }
            }
        }
        exp_m = sq;
    }
    matvec(n, &exp_m, x)
}

/// Tiny deterministic generator for test matrices (same scheme as the
/// library's seeding but reimplemented here to stay independent).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// Random dense antisymmetric matrix with entries in [-1, 1].
pub fn random_antisymmetric(n: usize, rng: &mut TestRng) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.symmetric();
            a[i * n + j] = v;
            a[j * n + i] = -v;
        }
    }
    a
}
