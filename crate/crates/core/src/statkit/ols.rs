//! Ordinary least squares with the diagnostics reported in regression
//! tables: standard errors, t and p values, R², adjusted R², F.
//!
//! The design (intercept first) is factored with Householder QR. A column
//! whose residual norm after projecting out the earlier columns falls below
//! `COLLINEARITY_TOL` times its own norm is reported as collinear.

use serde::{Deserialize, Serialize};

use super::descriptive::{mean, sample_sd};
use super::dist::{f_sf, student_t_sf};
use crate::error::{Error, Result};

const COLLINEARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    /// Index 0 is the intercept.
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    /// `None` for the intercept, and for every entry when `y` is constant.
    pub standardized_coefficients: Vec<Option<f64>>,
    pub r2: f64,
    pub r2_adj: f64,
    pub f_stat: f64,
    pub f_p: f64,
    pub residual_se: f64,
    pub n: usize,
    /// Number of predictors, excluding the intercept.
    pub k: usize,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Residuals are zero to rounding; p-values are reported as 0 rather
    /// than from a division by a zero variance.
    pub perfect_fit: bool,
}

impl RegressionResult {
    pub fn df_resid(&self) -> usize {
        self.n - self.k - 1
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slope(&self) -> f64 {
        self.coefficients[1]
    }
}

/// Simple regression `y = b0 + b1 x`.
pub fn ols_simple(x: &[f64], y: &[f64]) -> Result<RegressionResult> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if y.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: y.len(),
        });
    }
    match fit(&[x], y) {
        Err(Error::Collinearity { .. }) => Err(Error::SingularDesign),
        other => other,
    }
}

/// Multiple regression of `y` on the given predictor columns plus an
/// intercept.
pub fn ols_multi(columns: &[Vec<f64>], y: &[f64]) -> Result<RegressionResult> {
    let cols: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    if cols.is_empty() {
        return Err(Error::invalid("at least one predictor column is required"));
    }
    let needed = cols.len() + 2;
    if y.len() < needed {
        return Err(Error::InsufficientData { needed, got: y.len() });
    }
    fit(&cols, y)
}

fn fit(columns: &[&[f64]], y: &[f64]) -> Result<RegressionResult> {
    let n = y.len();
    let k = columns.len();
    let p = k + 1;
    for (j, col) in columns.iter().enumerate() {
        if col.len() != n {
            return Err(Error::invalid(format!(
                "predictor column {} has length {}, response has {n}",
                j + 1,
                col.len()
            )));
        }
    }
    if y.iter()
        .chain(columns.iter().flat_map(|c| c.iter()))
        .any(|v| !v.is_finite())
    {
        return Err(Error::invalid("regression inputs must be finite"));
    }

    // Column-major design with the intercept first.
    let mut design: Vec<Vec<f64>> = Vec::with_capacity(p);
    design.push(vec![1.0; n]);
    design.extend(columns.iter().map(|c| c.to_vec()));

    let qr = HouseholderQr::factor(design.clone())?;
    let y_constant = y.iter().all(|&v| v == y[0]);
    let coefficients = if y_constant {
        let mut c = vec![0.0; p];
        c[0] = y[0];
        c
    } else {
        qr.solve(y)
    };

    let fitted: Vec<f64> = (0..n)
        .map(|i| design.iter().zip(&coefficients).map(|(col, b)| col[i] * b).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();

    let y_mean = mean(y);
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let sst: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let ssr: f64 = fitted.iter().map(|v| (v - y_mean).powi(2)).sum();
    let df = (n - p) as f64;

    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let rounding = 64.0 * f64::EPSILON * scale;
    let perfect_fit = sse <= n as f64 * rounding * rounding;

    let sigma2 = if perfect_fit { 0.0 } else { sse / df };
    let inv_diag = qr.inverse_gram_diagonal();
    let standard_errors: Vec<f64> = inv_diag.iter().map(|d| (sigma2 * d).sqrt()).collect();

    let mut t_stats = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for (b, se) in coefficients.iter().zip(&standard_errors) {
        let t = if *b == 0.0 {
            0.0
        } else if *se > 0.0 {
            b / se
        } else {
            f64::INFINITY.copysign(*b)
        };
        t_stats.push(t);
        p_values.push(student_t_sf(t, df)?);
    }

    let (r2, f_stat) = if sst == 0.0 {
        (0.0, 0.0)
    } else {
        let r2 = (1.0 - sse / sst).clamp(0.0, 1.0);
        let f = if sigma2 > 0.0 {
            (ssr / k as f64) / sigma2
        } else if ssr > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        (r2, f)
    };
    let r2_adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df;
    let f_p = f_sf(f_stat, k as f64, df)?;

    let sd_y = sample_sd(y);
    let standardized_coefficients = std::iter::once(None)
        .chain(
            columns
                .iter()
                .zip(&coefficients[1..])
                .map(|(col, b)| (sd_y > 0.0).then(|| b * sample_sd(col) / sd_y)),
        )
        .collect();

    Ok(RegressionResult {
        coefficients,
        standard_errors,
        t_stats,
        p_values,
        standardized_coefficients,
        r2,
        r2_adj,
        f_stat,
        f_p,
        residual_se: sigma2.sqrt(),
        n,
        k,
        residuals,
        fitted,
        perfect_fit,
    })
}

/// Thin QR of an `n x p` column-major matrix.
struct HouseholderQr {
    /// Householder vectors below the diagonal, R on and above it.
    a: Vec<Vec<f64>>,
    /// Leading entry of each Householder vector.
    v0: Vec<f64>,
    n: usize,
}

impl HouseholderQr {
    fn factor(mut a: Vec<Vec<f64>>) -> Result<Self> {
        let p = a.len();
        let n = a[0].len();
        let col_norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
        let mut v0 = vec![0.0; p];
        for j in 0..p {
            let sub_norm = norm(&a[j][j..]);
            if sub_norm <= COLLINEARITY_TOL * col_norms[j] || sub_norm == 0.0 {
                // Column 0 is the intercept; report predictor numbering from 1.
                return Err(Error::Collinearity {
                    column: j,
                    name: format!("x{j}"),
                });
            }
            let alpha = if a[j][j] > 0.0 { -sub_norm } else { sub_norm };
            // v = x - alpha e1, stored in place; beta = 2 / v'v
            let first = a[j][j] - alpha;
            v0[j] = first;
            let vtv = first * first + a[j][j + 1..].iter().map(|v| v * v).sum::<f64>();
            for c in j + 1..p {
                let dot = first * a[c][j] + (j + 1..n).map(|i| a[j][i] * a[c][i]).sum::<f64>();
                let s = 2.0 * dot / vtv;
                a[c][j] -= s * first;
                for i in j + 1..n {
                    let vi = a[j][i];
                    a[c][i] -= s * vi;
                }
            }
            a[j][j] = alpha;
        }
        Ok(Self { a, v0, n })
    }

    fn p(&self) -> usize {
        self.a.len()
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        self.a[j][i]
    }

    /// Least-squares solution of `X b = y`.
    fn solve(&self, y: &[f64]) -> Vec<f64> {
        let mut qty = y.to_vec();
        let p = self.p();
        for j in 0..p {
            let first = self.v0[j];
            let tail = &self.a[j][j + 1..self.n];
            let vtv = first * first + tail.iter().map(|v| v * v).sum::<f64>();
            let dot = first * qty[j] + tail.iter().zip(&qty[j + 1..]).map(|(v, q)| v * q).sum::<f64>();
            let s = 2.0 * dot / vtv;
            qty[j] -= s * first;
            for (q, v) in qty[j + 1..].iter_mut().zip(tail) {
                *q -= s * v;
            }
        }
        let mut b = vec![0.0; p];
        for i in (0..p).rev() {
            let acc: f64 = (i + 1..p).map(|j| self.r(i, j) * b[j]).sum();
            b[i] = (qty[i] - acc) / self.r(i, i);
        }
        b
    }

    /// Diagonal of `(X'X)^-1 = R^-1 R^-T`.
    fn inverse_gram_diagonal(&self) -> Vec<f64> {
        let p = self.p();
        // rinv[i][j] upper triangular
        let mut rinv = vec![vec![0.0; p]; p];
        for j in 0..p {
            rinv[j][j] = 1.0 / self.r(j, j);
            for i in (0..j).rev() {
                let acc: f64 = (i + 1..=j).map(|m| self.r(i, m) * rinv[m][j]).sum();
                rinv[i][j] = -acc / self.r(i, i);
            }
        }
        (0..p).map(|i| (i..p).map(|j| rinv[i][j] * rinv[i][j]).sum()).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}
