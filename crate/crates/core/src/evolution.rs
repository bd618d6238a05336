//! Host-parasite analysis: year alignment, the log-log estimate of the
//! evolutionary coefficient, its multi-predictor extension, correlation of
//! advances and report assembly.
//!
//! All logs are natural logs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::{classify_point, classify_with_test, EvolutionClass};
use crate::series::TechSeries;
use crate::statkit::{
    descriptive, ols_multi, ols_simple, pearson_pairwise, zscore, CorrelationEntry, DescriptiveStats, RegressionResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignMode {
    /// Host with each parasite separately.
    Pairwise,
    /// One table over the years present in every series.
    Listwise,
}

/// Log-transformed values on a common set of years. Column 0 is the host.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTable {
    pub years: Vec<f64>,
    pub names: Vec<String>,
    pub log_columns: Vec<Vec<f64>>,
}

impl AlignedTable {
    fn build(series: &[&TechSeries]) -> Result<Self> {
        let mut years: BTreeSet<u64> = series[0].times().iter().map(|t| time_key(*t)).collect();
        for s in &series[1..] {
            let other: BTreeSet<u64> = s.times().iter().map(|t| time_key(*t)).collect();
            years = years.intersection(&other).copied().collect();
            if years.is_empty() {
                return Err(Error::NoOverlap {
                    first: series[0].name().to_string(),
                    second: s.name().to_string(),
                });
            }
        }
        let mut years: Vec<f64> = years.into_iter().map(unkey).collect();
        years.sort_by(f64::total_cmp);
        let log_columns = series
            .iter()
            .map(|s| {
                years
                    .iter()
                    .map(|&t| s.value_at(t).expect("year in intersection").ln())
                    .collect()
            })
            .collect();
        Ok(Self {
            years,
            names: series.iter().map(|s| s.name().to_string()).collect(),
            log_columns,
        })
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }
}

/// Order-preserving integer key for a time stamp.
pub(crate) fn time_key(t: f64) -> u64 {
    let bits = t.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

fn unkey(k: u64) -> f64 {
    if k >> 63 == 1 {
        f64::from_bits(k & !(1 << 63))
    } else {
        f64::from_bits(!k)
    }
}

/// Aligns the host with the parasites on common years. Pairwise mode
/// yields one table per parasite, listwise a single table.
pub fn align_by_year(host: &TechSeries, parasites: &[TechSeries], mode: AlignMode) -> Result<Vec<AlignedTable>> {
    match mode {
        AlignMode::Pairwise => parasites.iter().map(|p| AlignedTable::build(&[host, p])).collect(),
        AlignMode::Listwise => {
            let all: Vec<&TechSeries> = std::iter::once(host).chain(parasites).collect();
            Ok(vec![AlignedTable::build(&all)?])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionFit {
    pub host_name: String,
    pub parasite_name: String,
    pub regression: RegressionResult,
    /// Evolutionary coefficient: slope of ln P on ln H.
    pub b: f64,
    /// Intercept `ln A`.
    pub log_a: f64,
    pub classification: EvolutionClass,
    pub n_paired: usize,
    pub years_used: Vec<f64>,
    pub log_host: Vec<f64>,
    pub log_parasite: Vec<f64>,
}

impl EvolutionFit {
    pub fn b_standard_error(&self) -> f64 {
        self.regression.standard_errors[1]
    }

    /// Two-sided `(lower, upper)` interval for `B` at the given confidence.
    pub fn b_interval(&self, confidence: f64) -> Result<(f64, f64)> {
        let q = crate::statkit::student_t_upper_quantile((1.0 - confidence) / 2.0, self.regression.df_resid() as f64)?;
        let half = q * self.b_standard_error();
        Ok((self.b - half, self.b + half))
    }
}

/// Minimum number of aligned years for a host-parasite fit.
pub const MIN_PAIRED_YEARS: usize = 4;

/// Estimates `ln P_t = ln A + B ln H_t + u_t` and grades `B`.
///
/// A zero-residual fit is graded by exact comparison, since the t-test of
/// `B = 1` has no variance to work with.
pub fn fit_evolution(host: &TechSeries, parasite: &TechSeries, alpha: f64) -> Result<EvolutionFit> {
    let table = AlignedTable::build(&[host, parasite])?;
    if table.len() < MIN_PAIRED_YEARS {
        return Err(Error::InsufficientData {
            needed: MIN_PAIRED_YEARS,
            got: table.len(),
        }
        .context(format!("years shared by `{}` and `{}`", host.name(), parasite.name())));
    }
    let log_host = table.log_columns[0].clone();
    let log_parasite = table.log_columns[1].clone();
    let regression = ols_simple(&log_host, &log_parasite)
        .map_err(|e| e.context(format!("regressing `{}` on `{}`", parasite.name(), host.name())))?;
    let b = regression.slope();
    let log_a = regression.intercept();
    let classification = if regression.perfect_fit {
        classify_point(b)?
    } else {
        classify_with_test(b, regression.standard_errors[1], table.len(), alpha)?
    };
    Ok(EvolutionFit {
        host_name: host.name().to_string(),
        parasite_name: parasite.name().to_string(),
        n_paired: table.len(),
        years_used: table.years,
        regression,
        b,
        log_a,
        classification,
        log_host,
        log_parasite,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiEvolutionFit {
    pub target_parasite: String,
    /// Host first, then the other parasites, in input order.
    pub predictor_names: Vec<String>,
    pub regression: RegressionResult,
    /// Predictors ordered by absolute standardized coefficient, largest
    /// first; ties keep input order.
    pub dominant_predictors: Vec<String>,
    pub n_listwise: usize,
    pub years_used: Vec<f64>,
    pub alpha: f64,
}

/// Estimates `ln P1_t = ln a + B1 ln H_t + B2 ln P2_t + ... + e_t` on the
/// years where every series is observed.
pub fn fit_evolution_multi(
    target: &TechSeries,
    host: &TechSeries,
    others: &[TechSeries],
    alpha: f64,
) -> Result<MultiEvolutionFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut all: Vec<&TechSeries> = vec![target, host];
    all.extend(others);
    let table = AlignedTable::build(&all)?;
    let predictor_names: Vec<String> = table.names[1..].to_vec();
    let predictors: Vec<Vec<f64>> = table.log_columns[1..].to_vec();
    let needed = predictors.len() + 2;
    if table.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: table.len(),
        }
        .context(format!("years shared by all series for target `{}`", target.name())));
    }
    let regression = ols_multi(&predictors, &table.log_columns[0]).map_err(|e| match e {
        Error::Collinearity { column, .. } => Error::Collinearity {
            column,
            name: predictor_names[column - 1].clone(),
        },
        other => other,
    })?;

    let mut order: Vec<usize> = (0..predictor_names.len()).collect();
    let weight = |j: usize| regression.standardized_coefficients[j + 1].map(f64::abs).unwrap_or(0.0);
    // stable sort keeps input order on ties
    order.sort_by(|&i, &j| weight(j).total_cmp(&weight(i)));
    let dominant_predictors = order.iter().map(|&j| predictor_names[j].clone()).collect();

    Ok(MultiEvolutionFit {
        target_parasite: target.name().to_string(),
        predictor_names,
        n_listwise: table.len(),
        years_used: table.years,
        regression,
        dominant_predictors,
        alpha,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub series: Vec<String>,
    /// `entries[i][j]` correlates `series[i]` with `series[j]`.
    pub entries: Vec<Vec<CorrelationEntry>>,
}

impl CorrelationMatrix {
    pub fn empty() -> Self {
        Self {
            series: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

/// Pearson correlations of log values with pairwise deletion of missing
/// years. Cells with fewer than 3 shared years, or a constant side, are
/// left undefined instead of failing the matrix.
pub fn correlation_matrix(series: &[TechSeries]) -> Result<CorrelationMatrix> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: series.len(),
        }
        .context("correlation matrix series count"));
    }
    let mut years: BTreeSet<u64> = BTreeSet::new();
    for s in series {
        years.extend(s.times().iter().map(|t| time_key(*t)));
    }
    let years: Vec<f64> = years.into_iter().map(unkey).collect();
    let columns: Vec<Vec<Option<f64>>> = series
        .iter()
        .map(|s| years.iter().map(|&t| s.value_at(t).map(f64::ln)).collect())
        .collect();

    let m = series.len();
    let mut entries = vec![vec![CorrelationEntry { r: None, p: None, n: 0 }; m]; m];
    for i in 0..m {
        entries[i][i] = CorrelationEntry {
            r: Some(1.0),
            p: None,
            n: series[i].len(),
        };
        for j in i + 1..m {
            let pairs = columns[i]
                .iter()
                .zip(&columns[j])
                .filter(|(a, b)| a.is_some() && b.is_some())
                .count();
            let entry = pearson_pairwise(&columns[i], &columns[j]).unwrap_or(CorrelationEntry {
                r: None,
                p: None,
                n: pairs,
            });
            entries[i][j] = entry;
            entries[j][i] = entry;
        }
    }
    Ok(CorrelationMatrix {
        series: series.iter().map(|s| s.name().to_string()).collect(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedDescriptive {
    pub name: String,
    pub stats: DescriptiveStats,
}

/// Z-scored raw values of one series over its own observation years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub name: String,
    pub times: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub alpha: f64,
    /// One host-parasite fit per parasite.
    pub fit_each_parasite: bool,
    /// Regress the first parasite on the host and the remaining parasites.
    pub multi: bool,
    pub correlations: bool,
    pub aggregator: String,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            alpha: crate::scale::DEFAULT_ALPHA,
            fit_each_parasite: true,
            multi: false,
            correlations: false,
            aggregator: "mean".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub log_base: String,
    pub inputs: Vec<String>,
    pub options: ReportOptions,
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub meta: ReportMeta,
    pub fits: Vec<EvolutionFit>,
    pub multi_fits: Vec<MultiEvolutionFit>,
    pub correlations: CorrelationMatrix,
    pub descriptives: Vec<NamedDescriptive>,
    pub standardized_trajectories: Vec<Trajectory>,
}

pub struct ReportInputs<'a> {
    pub host: &'a TechSeries,
    pub parasites: &'a [TechSeries],
    /// Provenance labels, typically input file names.
    pub sources: Vec<String>,
    pub generated_at: Option<String>,
}

pub fn build_report(inputs: ReportInputs<'_>, options: ReportOptions) -> Result<AnalysisReport> {
    let ReportInputs {
        host,
        parasites,
        sources,
        generated_at,
    } = inputs;
    if !(options.fit_each_parasite || options.multi) {
        return Err(Error::invalid("report needs at least one fit"));
    }
    if parasites.is_empty() {
        return Err(Error::invalid("report needs at least one parasite series"));
    }

    let fits = if options.fit_each_parasite {
        parasites
            .iter()
            .map(|p| fit_evolution(host, p, options.alpha))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let multi_fits = if options.multi {
        if parasites.len() < 2 {
            return Err(Error::invalid(
                "multi-predictor fit needs a target and at least one other parasite",
            ));
        }
        vec![fit_evolution_multi(
            &parasites[0],
            host,
            &parasites[1..],
            options.alpha,
        )?]
    } else {
        Vec::new()
    };

    let all: Vec<TechSeries> = std::iter::once(host).chain(parasites).cloned().collect();
    let correlations = if options.correlations {
        correlation_matrix(&all)?
    } else {
        CorrelationMatrix::empty()
    };

    let descriptives = all
        .iter()
        .map(|s| {
            Ok(NamedDescriptive {
                name: s.name().to_string(),
                stats: descriptive(&s.log_values()).map_err(|e| e.context(s.name().to_string()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let standardized_trajectories = all
        .iter()
        .map(|s| {
            Ok(Trajectory {
                name: s.name().to_string(),
                times: s.times(),
                z: zscore(&s.values()).map_err(|e| e.context(s.name().to_string()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(AnalysisReport {
        meta: ReportMeta {
            tool: format!("parasitech {}", env!("CARGO_PKG_VERSION")),
            log_base: "e".into(),
            inputs: sources,
            options,
            generated_at,
        },
        fits,
        multi_fits,
        correlations,
        descriptives,
        standardized_trajectories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::Mode;
    use crate::series::Role;
    use approx::assert_relative_eq;

    fn series(name: &str, times: &[f64], values: &[f64]) -> TechSeries {
        TechSeries::from_pairs(name, Role::Parasite, times, values).unwrap()
    }

    #[test]
    fn time_keys_preserve_order() {
        let ts = [-3.5, -0.0, 0.0, 1.0, 1920.0, 2018.25];
        for w in ts.windows(2) {
            assert!(time_key(w[0]) <= time_key(w[1]));
        }
        for t in ts {
            assert_eq!(unkey(time_key(t)).to_bits(), t.to_bits());
        }
    }

    #[test]
    fn pairwise_intersection() {
        let h = series("h", &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        let p = series("p", &[2.0, 3.0, 4.0], &[5.0, 6.0, 7.0]);
        let t = align_by_year(&h, &[p], AlignMode::Pairwise).unwrap();
        assert_eq!(t[0].years, vec![2.0, 3.0]);
        assert_eq!(t[0].log_columns[0], vec![2.0f64.ln(), 3.0f64.ln()]);
        assert_eq!(t[0].log_columns[1], vec![5.0f64.ln(), 6.0f64.ln()]);
    }

    #[test]
    fn disjoint_years_error() {
        let h = series("h", &[1.0, 2.0], &[1.0, 2.0]);
        let p = series("p", &[3.0, 4.0], &[1.0, 2.0]);
        match align_by_year(&h, &[p], AlignMode::Listwise).unwrap_err() {
            Error::NoOverlap { first, second } => assert_eq!((first.as_str(), second.as_str()), ("h", "p")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_power_law() {
        let times: Vec<f64> = (0..9).map(|i| 1990.0 + i as f64).collect();
        let h: Vec<f64> = (0..9).map(|i| 1.0 + 0.7 * i as f64 + (i as f64).sin().abs()).collect();
        let p: Vec<f64> = h.iter().map(|v| 2.0 * v.powf(1.5)).collect();
        let fit = fit_evolution(&series("h", &times, &h), &series("p", &times, &p), 0.05).unwrap();
        assert_relative_eq!(fit.b, 1.5, epsilon = 1e-10);
        assert_relative_eq!(fit.log_a, 2.0f64.ln(), epsilon = 1e-10);
        assert_relative_eq!(fit.regression.r2, 1.0, epsilon = 1e-12);
        assert!(fit.regression.perfect_fit);
        assert_eq!(fit.classification.grade, 3);
    }

    #[test]
    fn proportional_growth_is_mutualism() {
        let times: Vec<f64> = (0..10).map(f64::from).collect();
        let h: Vec<f64> = (0..10).map(|i| (0.3 * i as f64).exp() + 0.1 * i as f64).collect();
        let p: Vec<f64> = h.iter().map(|v| 4.5 * v).collect();
        let fit = fit_evolution(&series("h", &times, &h), &series("p", &times, &p), 0.05).unwrap();
        assert_eq!(fit.classification.grade, 2);
        assert_eq!(fit.classification.mode, Mode::Mutualism);
    }

    #[test]
    fn too_few_shared_years() {
        let h = series("h", &[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]);
        let p = series("p", &[2.0, 3.0, 4.0, 5.0], &[1.0, 2.0, 3.0, 4.0]);
        let err = fit_evolution(&h, &p, 0.05).unwrap_err();
        assert_eq!(err.code(), "INSUFFICIENT_DATA");
    }

    #[test]
    fn multi_exact_product() {
        let times: Vec<f64> = (0..8).map(f64::from).collect();
        let h: Vec<f64> = (0..8).map(|i| 1.0 + i as f64).collect();
        let p2: Vec<f64> = (0..8).map(|i| 2.0 + ((i * 7) % 5) as f64).collect();
        let y: Vec<f64> = h.iter().zip(&p2).map(|(a, b)| a.powf(0.5) * b.powf(0.3)).collect();
        let fit = fit_evolution_multi(
            &series("p1", &times, &y),
            &series("h", &times, &h),
            &[series("p2", &times, &p2)],
            0.05,
        )
        .unwrap();
        let c = &fit.regression.coefficients;
        assert!(c[0].abs() < 1e-10);
        assert_relative_eq!(c[1], 0.5, epsilon = 1e-10);
        assert_relative_eq!(c[2], 0.3, epsilon = 1e-10);
        assert_eq!(fit.predictor_names, vec!["h", "p2"]);
    }

    #[test]
    fn multi_duplicate_predictor_named() {
        let times: Vec<f64> = (0..8).map(f64::from).collect();
        let h: Vec<f64> = (0..8).map(|i| 1.0 + i as f64).collect();
        let p2: Vec<f64> = (0..8).map(|i| 2.0 + ((i * 7) % 5) as f64).collect();
        let y: Vec<f64> = (0..8).map(|i| 3.0 + ((i * 3) % 4) as f64).collect();
        let err = fit_evolution_multi(
            &series("p1", &times, &y),
            &series("h", &times, &h),
            &[series("p2", &times, &p2), series("p3", &times, &p2)],
            0.05,
        )
        .unwrap_err();
        match err {
            Error::Collinearity { name, .. } => assert_eq!(name, "p3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn correlation_matrix_undefined_cells() {
        let a = series("a", &[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]);
        let b = series("b", &[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]);
        let c = series("c", &[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0]);
        let m = correlation_matrix(&[a, b, c]).unwrap();
        assert_relative_eq!(m.entries[0][1].r.unwrap(), 1.0, epsilon = 1e-14);
        assert!(m.entries[0][1].p.unwrap() < 1e-10);
        assert_eq!(m.entries[0][2].n, 2);
        assert!(m.entries[0][2].r.is_none() && m.entries[0][2].p.is_none());
        assert_eq!(m.entries[2][2].r, Some(1.0));
        assert!(correlation_matrix(&[series("x", &[1.0], &[1.0])]).is_err());
    }

    #[test]
    fn report_requires_a_fit() {
        let h = series("h", &[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]);
        let opts = ReportOptions {
            fit_each_parasite: false,
            ..ReportOptions::default()
        };
        let inputs = ReportInputs {
            host: &h,
            parasites: std::slice::from_ref(&h),
            sources: vec![],
            generated_at: None,
        };
        assert!(build_report(inputs, opts).is_err());
    }
}
