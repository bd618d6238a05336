//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's numeric code: the regression
//! oracles use textbook sum formulas and a Gauss-Jordan inverse of `XᵀX`,
//! the distribution oracles use closed forms or quadrature, and the
//! power-law oracle eliminates time numerically from sampled curves.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simple regression by the Σ formulas.
#[derive(Debug, Clone, Copy)]
pub struct SimpleOracle {
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    pub r2: f64,
}

pub fn simple_regression(x: &[f64], y: &[f64]) -> SimpleOracle {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let mx = sx / n;
    let my = sy / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let s2 = sse / (n - 2.0);
    let sum_x2: f64 = x.iter().map(|v| v * v).sum();
    SimpleOracle {
        intercept,
        slope,
        se_intercept: (s2 * sum_x2 / (n * sxx)).sqrt(),
        se_slope: (s2 / sxx).sqrt(),
        r2: 1.0 - sse / syy,
    }
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

/// Multiple regression via `β = (XᵀX)⁻¹Xᵀy`, intercept first.
#[derive(Debug, Clone)]
pub struct MultiOracle {
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub r2: f64,
}

pub fn normal_equations(columns: &[Vec<f64>], y: &[f64]) -> MultiOracle {
    let n = y.len();
    let p = columns.len() + 1;
    let row = |i: usize, j: usize| if j == 0 { 1.0 } else { columns[j - 1][i] };
    let xtx: Vec<Vec<f64>> = (0..p)
        .map(|a| (0..p).map(|b| (0..n).map(|i| row(i, a) * row(i, b)).sum()).collect())
        .collect();
    let xty: Vec<f64> = (0..p).map(|a| (0..n).map(|i| row(i, a) * y[i]).sum()).collect();
    let inv = invert(xtx);
    let beta: Vec<f64> = (0..p).map(|a| (0..p).map(|b| inv[a][b] * xty[b]).sum()).collect();
    let fitted: Vec<f64> = (0..n).map(|i| (0..p).map(|a| row(i, a) * beta[a]).sum()).collect();
    let sse: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let my = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let s2 = sse / (n - p) as f64;
    MultiOracle {
        se: (0..p).map(|a| (s2 * inv[a][a]).sqrt()).collect(),
        beta,
        r2: 1.0 - sse / sst,
    }
}

/// Two-sided Student-t tail, df = 1 (Cauchy).
pub fn t_two_sided_df1(t: f64) -> f64 {
    1.0 - 2.0 / std::f64::consts::PI * t.abs().atan()
}

/// Two-sided Student-t tail, df = 2.
pub fn t_two_sided_df2(t: f64) -> f64 {
    1.0 - t.abs() / (2.0 + t * t).sqrt()
}

/// Two-sided standard-normal tail.
pub fn normal_two_sided(z: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    2.0 * Normal::standard().sf(z.abs())
}

/// Upper F tail by adaptive Simpson quadrature. With `u = s / (1 + s)` and
/// `s = d1 f / d2`, `u` is Beta(d1/2, d2/2) distributed, so the tail is the
/// integral of that density over `[u0, 1]`.
pub fn f_tail_quadrature(f: f64, d1: f64, d2: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let a = d1 / 2.0;
    let b = d2 / 2.0;
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let density = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            0.0
        } else {
            ((a - 1.0) * u.ln() + (b - 1.0) * (1.0 - u).ln() - ln_beta).exp()
        }
    };
    let s = d1 * f / d2;
    let u0 = s / (1.0 + s);
    adaptive_simpson(&density, u0, 1.0, 1e-13, 50)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (f(a) + 4.0 * fm + f(b)), fm)
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (left, _) = simpson(f, a, m);
        let (right, _) = simpson(f, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1) + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    let (whole, _) = simpson(f, a, b);
    recurse(f, a, b, whole, tol, depth)
}

/// Brute-force moments: mean, sample sd, adjusted skewness G1 and excess
/// kurtosis G2 (the bias-corrected estimators of common statistics packages).
pub fn moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    let sd = (m2 * n / (n - 1.0)).sqrt();
    let g1 = m3 / m2.powf(1.5);
    let skew = g1 * (n * (n - 1.0)).sqrt() / (n - 2.0);
    let g2 = m4 / (m2 * m2) - 3.0;
    let kurt = (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
    (m, sd, skew, kurt)
}

pub fn pearson_sigma(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|a| a * a).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Logistic value written out independently of the library.
pub fn logistic(k: f64, a: f64, b: f64, t: f64) -> f64 {
    k / (1.0 + (a - b * t).exp())
}

/// Eliminates time numerically: samples both curves on an early window where
/// each sits below `depth` of its ceiling, and regresses `ln P` on `ln H`.
/// Returns `(slope, intercept)`.
pub fn elimination_of_t(host: (f64, f64, f64), parasite: (f64, f64, f64), depth: f64) -> (f64, f64) {
    let (k1, a1, b1) = host;
    let (k2, a2, b2) = parasite;
    // value/K < depth  <=>  t < (a - ln(1/depth - 1)) / b
    let cut = (1.0 / depth - 1.0).ln();
    let t_hi = ((a1 - cut) / b1).min((a2 - cut) / b2);
    let span = 10.0 / b1.min(b2);
    let ts: Vec<f64> = (0..40).map(|i| t_hi - span + span * i as f64 / 39.0).collect();
    let lh: Vec<f64> = ts.iter().map(|&t| logistic(k1, a1, b1, t).ln()).collect();
    let lp: Vec<f64> = ts.iter().map(|&t| logistic(k2, a2, b2, t).ln()).collect();
    let fit = simple_regression(&lh, &lp);
    (fit.slope, fit.intercept)
}

/// Random logistic parameters `(K, a, b)` with inflection inside `[1950, 2050]`.
pub fn random_logistic(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let k = 10f64.powf(rng.random_range(0.0..4.0));
    let b = rng.random_range(0.02..0.5);
    let t_mid = rng.random_range(1950.0..2050.0);
    (k, b * t_mid, b)
}
