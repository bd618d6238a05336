use serde::{Deserialize, Serialize};

use super::dist::student_t_sf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub sd: f64,
    /// Adjusted Fisher-Pearson skewness; `None` when n < 3 or sd = 0.
    pub skewness: Option<f64>,
    /// Excess kurtosis; `None` when n < 4 or sd = 0.
    pub kurtosis: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    /// `None` when fewer than 3 complete pairs exist or a side is constant.
    pub r: Option<f64>,
    /// Two-sided p-value of `r = 0`.
    pub p: Option<f64>,
    /// Complete pairs used.
    pub n: usize,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

pub fn descriptive(values: &[f64]) -> Result<DescriptiveStats> {
    let n = values.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("descriptive statistics need finite values"));
    }
    let m = mean(values);
    let constant = values.iter().all(|&v| v == values[0]);
    let sd = if constant { 0.0 } else { sample_sd(values) };
    let nf = n as f64;

    let skewness = (n >= 3 && sd > 0.0).then(|| {
        let m2 = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf;
        let m3 = values.iter().map(|v| (v - m).powi(3)).sum::<f64>() / nf;
        let g1 = m3 / m2.powf(1.5);
        g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
    });
    let kurtosis = (n >= 4 && sd > 0.0).then(|| {
        let z4: f64 = values.iter().map(|v| ((v - m) / sd).powi(4)).sum();
        nf * (nf + 1.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0)) * z4
            - 3.0 * (nf - 1.0).powi(2) / ((nf - 2.0) * (nf - 3.0))
    });

    Ok(DescriptiveStats {
        n,
        mean: m,
        sd,
        skewness,
        kurtosis,
    })
}

/// Pearson correlation of two complete, index-paired samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationEntry> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let x_constant = x.iter().all(|&v| v == x[0]);
    let y_constant = y.iter().all(|&v| v == y[0]);
    if x_constant || y_constant || sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("one side is constant".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(CorrelationEntry {
        r: Some(r),
        p: Some(correlation_p(r, n)?),
        n,
    })
}

/// Pearson correlation with pairwise deletion: pairs where either side is
/// missing are dropped before computing.
pub fn pearson_pairwise(x: &[Option<f64>], y: &[Option<f64>]) -> Result<CorrelationEntry> {
    if x.len() != y.len() {
        return Err(Error::invalid("paired samples differ in length"));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = x.iter().zip(y).filter_map(|(a, b)| Some(((*a)?, (*b)?))).unzip();
    pearson(&xs, &ys)
}

fn correlation_p(r: f64, n: usize) -> Result<f64> {
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    student_t_sf(t, df)
}

/// Z-scores with the sample standard deviation.
pub fn zscore(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateSeries("zero standard deviation".into()));
    }
    let m = mean(values);
    let sd = sample_sd(values);
    Ok(values.iter().map(|v| (v - m) / sd).collect())
}
