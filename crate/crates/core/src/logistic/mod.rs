//! Symmetric logistic growth `K / (1 + exp(a - b t))`, its logit
//! linearization `ln((K - v) / v) = a - b t`, a fitter for `(K, a, b)`,
//! forecasting, and the host-parasite power law obtained by eliminating
//! time between two logistic laws.
//!
//! Eliminating `t` gives, exactly,
//!
//! ```text
//! H / (K1 - H) = C1 * (P / (K2 - P))^(b1 / b2),   C1 = exp(b1 (t2 - t1))
//! ```
//!
//! with `t_i = a_i / b_i` the inflection times. While both curves are far
//! below saturation this reduces to `P = A H^B` with `B = b2 / b1` and
//! `A = K2 (C1 K1)^(-B)`.
//!
//! Note: a commonly printed form of the constant, `K2 / K1^(b2/b1) * C1`,
//! does not follow from the exact relation above; the small-value limit
//! gives `C1^(-B)` in place of `C1`. This module uses the derived form.

mod golden;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TechSeries;
use crate::statkit::ols_simple;

pub use golden::{GoldenSection, Minimum};

/// Values closer than this fraction of `K` to `K` have no usable logit.
const SATURATION_GUARD: f64 = 1e-12;

pub const DEFAULT_K_MAX_FACTOR: f64 = 10.0;

/// Lower end of the K search, as a multiple of the largest observation.
const K_MIN_FACTOR: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Equilibrium (saturation) level.
    pub k: f64,
    /// Initial-condition constant.
    pub a: f64,
    /// Rate of growth.
    pub b: f64,
}

impl LogisticParams {
    pub fn new(k: f64, a: f64, b: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid(format!("K must be positive and finite, got {k}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::invalid(format!("b must be positive and finite, got {b}")));
        }
        if !a.is_finite() {
            return Err(Error::invalid(format!("a must be finite, got {a}")));
        }
        Ok(Self { k, a, b })
    }

    /// Parameters from the inflection time `t_mid` instead of `a`.
    pub fn from_inflection(k: f64, b: f64, t_mid: f64) -> Result<Self> {
        Self::new(k, b * t_mid, b)
    }

    pub fn inflection_time(&self) -> f64 {
        self.a / self.b
    }

    pub fn value(&self, t: f64) -> f64 {
        logistic_value(self, t)
    }

    /// Time at which the curve reaches `fraction * K`, `0 < fraction < 1`.
    pub fn time_at_fraction(&self, fraction: f64) -> f64 {
        (self.a - ((1.0 - fraction) / fraction).ln()) / self.b
    }
}

pub fn logistic_value(p: &LogisticParams, t: f64) -> f64 {
    p.k / (1.0 + (p.a - p.b * t).exp())
}

/// Maps each observation to `(t, ln((K - v) / v))`.
pub fn logit_transform(series: &TechSeries, k: f64) -> Result<Vec<(f64, f64)>> {
    let max_value = series.max_value().unwrap_or(0.0);
    if !(k.is_finite() && k - max_value > SATURATION_GUARD * k) {
        return Err(Error::InvalidK { k, max_value });
    }
    Ok(series
        .observations()
        .iter()
        .map(|o| (o.t, ((k - o.value) / o.value).ln()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFitReport {
    pub params: LogisticParams,
    /// R² of the straight-line fit in logit space.
    pub r2_logit: f64,
    /// The chosen K lies within 1% of the upper end of the search range.
    pub k_at_bound: bool,
    pub n: usize,
}

/// Fits `(K, a, b)` by choosing K in `(max * (1 + 1e-6), max * k_max_factor]`
/// to maximize the R² of the logit-space regression on time, searched by
/// golden section over `ln K`.
pub fn fit_logistic(series: &TechSeries, k_max_factor: f64) -> Result<LogisticFitReport> {
    series.require_len(4)?;
    if !(k_max_factor.is_finite() && k_max_factor > K_MIN_FACTOR) {
        return Err(Error::invalid(format!(
            "k_max_factor must exceed 1, got {k_max_factor}"
        )));
    }
    let values = series.values();
    if values.iter().all(|&v| v == values[0]) {
        return Err(Error::DegenerateSeries(format!(
            "series `{}` is constant",
            series.name()
        )));
    }
    let max_value = series.max_value().expect("non-empty");
    let times = series.times();

    let lo = (max_value * K_MIN_FACTOR).ln();
    let hi = (max_value * k_max_factor).ln();

    let unexplained = |log_k: f64| -> f64 {
        let k = log_k.exp();
        let logits: Vec<f64> = values.iter().map(|v| ((k - v) / v).ln()).collect();
        match ols_simple(&times, &logits) {
            Ok(r) => {
                let sse: f64 = r.residuals.iter().map(|e| e * e).sum();
                let m = logits.iter().sum::<f64>() / logits.len() as f64;
                let sst: f64 = logits.iter().map(|l| (l - m).powi(2)).sum();
                if sst > 0.0 {
                    sse / sst
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    };
    let best = GoldenSection::default().minimize(unexplained, lo, hi);
    let k = best.x.exp();

    let logits = logit_transform(series, k)?;
    let (ts, ls): (Vec<f64>, Vec<f64>) = logits.into_iter().unzip();
    let reg = ols_simple(&ts, &ls)?;
    let b = -reg.slope();
    if !(b > 0.0) {
        return Err(Error::FitFailure(format!(
            "series `{}` has no increasing logistic trend (fitted growth rate {b})",
            series.name()
        )));
    }
    let params = LogisticParams::new(k, reg.intercept(), b)?;
    let upper = max_value * k_max_factor;
    Ok(LogisticFitReport {
        params,
        r2_logit: reg.r2,
        k_at_bound: k >= 0.99 * upper,
        n: series.len(),
    })
}

/// Evaluates the fitted curve at each horizon time.
pub fn forecast_series(fit: &LogisticFitReport, horizon: &[f64]) -> Vec<(f64, f64)> {
    horizon.iter().map(|&t| (t, fit.params.value(t))).collect()
}

/// `P = A H^B` relation between a host and a parasite logistic law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    /// Scale constant `A`.
    pub scale: f64,
    /// Evolutionary coefficient `B = b2 / b1`.
    pub exponent: f64,
    /// `C1 = exp(b1 (t2 - t1))`.
    pub c1: f64,
    /// `ln A`, kept separately since `A` itself may under- or overflow.
    pub log_scale: f64,
}

impl PowerLaw {
    pub fn value(&self, h: f64) -> f64 {
        (self.log_scale + self.exponent * h.ln()).exp()
    }
}

pub fn derive_power_law(host: &LogisticParams, parasite: &LogisticParams) -> PowerLaw {
    let exponent = parasite.b / host.b;
    let log_c1 = host.b * (parasite.inflection_time() - host.inflection_time());
    let log_scale = parasite.k.ln() - exponent * (log_c1 + host.k.ln());
    PowerLaw {
        scale: log_scale.exp(),
        exponent,
        c1: log_c1.exp(),
        log_scale,
    }
}
