use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::fmt_sig;
use crate::error::{Error, Result};
use crate::evolution::{AnalysisReport, EvolutionFit, MultiEvolutionFit};
use crate::statkit::significance_stars;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::invalid(format!(
                "unknown format `{other}` (expected text, json or csv)"
            ))),
        }
    }
}

pub fn render_report(report: &AnalysisReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Text => Ok(render_text(report).into_bytes()),
        ReportFormat::Json => to_json_bytes(report),
        ReportFormat::Csv => render_csv(report),
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
/// Non-finite numbers become `null`.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = fmt_sig(x).parse().unwrap_or(x);
            *v = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn fixed2(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.2}")
    } else {
        "n/a".into()
    }
}

fn format_p(p: f64) -> String {
    if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.3}")
    }
}

fn p_clause(p: f64) -> String {
    if p < 0.001 {
        "p < 0.001".into()
    } else {
        format!("p = {p:.3}")
    }
}

fn year_span(years: &[f64]) -> String {
    match (years.first(), years.last()) {
        (Some(a), Some(b)) => format!("{}-{}", fmt_sig(*a), fmt_sig(*b)),
        _ => "none".into(),
    }
}

const LABEL_WIDTH: usize = 40;

fn push_row(out: &mut String, label: &str, value: String) {
    let _ = writeln!(out, "  {label:<LABEL_WIDTH$}{value}");
}

fn render_simple_fit(out: &mut String, fit: &EvolutionFit) {
    let r = &fit.regression;
    let c = &fit.classification;
    let _ = writeln!(out, "Evolution of `{}` in host `{}`", fit.parasite_name, fit.host_name);
    let _ = writeln!(
        out,
        "  years {} (n = {}), natural logs",
        year_span(&fit.years_used),
        fit.n_paired
    );
    push_row(
        out,
        "Constant α (St. Err.)",
        format!(
            "{}{} ({})",
            fixed2(fit.log_a),
            significance_stars(r.p_values[0]),
            fixed2(r.standard_errors[0])
        ),
    );
    push_row(
        out,
        "Evolutionary coefficient B (St. Err.)",
        format!(
            "{}{} ({})",
            fixed2(fit.b),
            significance_stars(r.p_values[1]),
            fixed2(r.standard_errors[1])
        ),
    );
    push_row(
        out,
        "R² adj. (St. Err. of estimate)",
        format!("{} ({})", fixed2(r.r2_adj), fixed2(r.residual_se)),
    );
    push_row(out, "F (sign.)", format!("{} ({})", fixed2(r.f_stat), format_p(r.f_p)));
    push_row(
        out,
        "Grade of evolution",
        format!(
            "grade {} ({}), {}, {} {}",
            c.grade,
            c.grade_name(),
            c.mode,
            c.evolution_label,
            c.symbol
        ),
    );
    push_row(out, "Prediction", c.prediction.clone());
    match &c.test {
        Some(t) => push_row(
            out,
            "Test of B = 1",
            format!(
                "t = {}, {} (df {}, alpha {})",
                fixed2(t.t_stat),
                p_clause(t.p_value),
                t.df,
                t.alpha
            ),
        ),
        None if r.perfect_fit => push_row(out, "Test of B = 1", "perfect fit, graded by exact comparison".into()),
        None => {}
    }
    if c.negative_b {
        push_row(out, "Warning", "negative B lies outside the scale; graded 1".into());
    }
}

fn render_multi_fit(out: &mut String, fit: &MultiEvolutionFit) {
    let r = &fit.regression;
    let _ = writeln!(
        out,
        "Multidimensional evolution of `{}` on {}",
        fit.target_parasite,
        fit.predictor_names
            .iter()
            .map(|n| format!("`{n}`"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(
        out,
        "  years {} (n = {}, listwise), natural logs",
        year_span(&fit.years_used),
        fit.n_listwise
    );
    push_row(
        out,
        "Constant α (St. Err.)",
        format!(
            "{}{} ({})",
            fixed2(r.coefficients[0]),
            significance_stars(r.p_values[0]),
            fixed2(r.standard_errors[0])
        ),
    );
    for (j, name) in fit.predictor_names.iter().enumerate() {
        let std = r.standardized_coefficients[j + 1]
            .map(fixed2)
            .unwrap_or_else(|| "n/a".into());
        push_row(
            out,
            &format!("B{} {name} (St. Err.) [std.]", j + 1),
            format!(
                "{}{} ({}) [{}]",
                fixed2(r.coefficients[j + 1]),
                significance_stars(r.p_values[j + 1]),
                fixed2(r.standard_errors[j + 1]),
                std
            ),
        );
    }
    push_row(
        out,
        "R² adj. (St. Err. of estimate)",
        format!("{} ({})", fixed2(r.r2_adj), fixed2(r.residual_se)),
    );
    push_row(out, "F (sign.)", format!("{} ({})", fixed2(r.f_stat), format_p(r.f_p)));
    push_row(out, "Dominant predictors", fit.dominant_predictors.join(" > "));
}

fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} | logs base e | alpha {}",
        report.meta.tool, report.meta.options.alpha
    );
    if !report.meta.inputs.is_empty() {
        let _ = writeln!(out, "inputs: {}", report.meta.inputs.join(", "));
    }
    for fit in &report.fits {
        out.push('\n');
        render_simple_fit(&mut out, fit);
    }
    for fit in &report.multi_fits {
        out.push('\n');
        render_multi_fit(&mut out, fit);
    }
    if !report.correlations.is_empty() {
        out.push_str("\nPearson correlation of log values (r, stars, n)\n");
        let names = &report.correlations.series;
        let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(6);
        let _ = write!(out, "  {:width$}", "");
        for n in names {
            let _ = write!(out, " {n:>14}");
        }
        out.push('\n');
        for (name, row) in names.iter().zip(&report.correlations.entries) {
            let _ = write!(out, "  {name:width$}");
            for e in row {
                let cell = match e.r {
                    Some(r) => format!("{}{} ({})", fixed2(r), e.p.map(significance_stars).unwrap_or(""), e.n),
                    None => format!("n/a ({})", e.n),
                };
                let _ = write!(out, " {cell:>14}");
            }
            out.push('\n');
        }
    }
    if !report.descriptives.is_empty() {
        out.push_str("\nDescriptive statistics of log values\n");
        let _ = writeln!(
            out,
            "  {:<20} {:>5} {:>9} {:>9} {:>9} {:>9}",
            "series", "n", "mean", "sd", "skewness", "kurtosis"
        );
        let opt = |v: Option<f64>| v.map(fixed2).unwrap_or_else(|| "n/a".into());
        for d in &report.descriptives {
            let s = &d.stats;
            let _ = writeln!(
                out,
                "  {:<20} {:>5} {:>9} {:>9} {:>9} {:>9}",
                d.name,
                s.n,
                fixed2(s.mean),
                fixed2(s.sd),
                opt(s.skewness),
                opt(s.kurtosis)
            );
        }
    }
    out.push_str("\nSignificance: *** p < .001, ** p < .01, * p < .05\n");
    out
}

fn render_csv(report: &AnalysisReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "kind",
        "target",
        "predictors",
        "n",
        "constant",
        "constant_se",
        "b",
        "b_se",
        "b_t",
        "b_p",
        "r2",
        "r2_adj",
        "residual_se",
        "f",
        "f_p",
        "grade",
        "mode",
        "evolution",
        "symbol",
    ])
    .map_err(csv_err)?;
    let num = |x: f64| if x.is_finite() { fmt_sig(x) } else { String::new() };
    for fit in &report.fits {
        let r = &fit.regression;
        let c = &fit.classification;
        w.write_record([
            "simple".to_string(),
            fit.parasite_name.clone(),
            fit.host_name.clone(),
            fit.n_paired.to_string(),
            num(fit.log_a),
            num(r.standard_errors[0]),
            num(fit.b),
            num(r.standard_errors[1]),
            num(r.t_stats[1]),
            num(r.p_values[1]),
            num(r.r2),
            num(r.r2_adj),
            num(r.residual_se),
            num(r.f_stat),
            num(r.f_p),
            c.grade.to_string(),
            c.mode.to_string(),
            c.evolution_label.to_string(),
            c.symbol.clone(),
        ])
        .map_err(csv_err)?;
    }
    for fit in &report.multi_fits {
        let r = &fit.regression;
        let mut row = vec![
            "multi".to_string(),
            fit.target_parasite.clone(),
            fit.predictor_names.join(";"),
            fit.n_listwise.to_string(),
            num(r.coefficients[0]),
            num(r.standard_errors[0]),
        ];
        row.extend(std::iter::repeat_n(String::new(), 4));
        row.extend([num(r.r2), num(r.r2_adj), num(r.residual_se), num(r.f_stat), num(r.f_p)]);
        row.extend(std::iter::repeat_n(String::new(), 4));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}
