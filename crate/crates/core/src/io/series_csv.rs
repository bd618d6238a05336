use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fmt_sig;
use crate::error::{Error, Result};
use crate::series::{Observation, Role, TechSeries};

/// How rows sharing a time stamp are collapsed into one observation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Mean,
    Median,
    Max,
}

impl Aggregator {
    pub fn apply(self, values: &mut [f64]) -> f64 {
        match self {
            Aggregator::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregator::Median => {
                values.sort_by(f64::total_cmp);
                let n = values.len();
                if n % 2 == 1 {
                    values[n / 2]
                } else {
                    0.5 * (values[n / 2 - 1] + values[n / 2])
                }
            }
            Aggregator::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::Median => "median",
            Aggregator::Max => "max",
        }
    }
}

impl FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Aggregator::Mean),
            "median" => Ok(Aggregator::Median),
            "max" => Ok(Aggregator::Max),
            other => Err(Error::invalid(format!(
                "unknown aggregator `{other}` (expected mean, median or max)"
            ))),
        }
    }
}

impl std::fmt::Display for Aggregator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub path: String,
    pub parsed: TechSeries,
    pub warnings: Vec<String>,
}

/// Reads a `t,value` CSV file. See [`parse_series_str`] for the format.
pub fn parse_series_csv(
    path: impl AsRef<Path>,
    name: Option<&str>,
    role: Role,
    units: &str,
    aggregator: Aggregator,
) -> Result<SeriesFile> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read(path).map_err(|e| Error::from(e).context(display.clone()))?;
    let text = String::from_utf8(text).map_err(|e| Error::Format {
        source_name: display.clone(),
        line: 0,
        message: format!("file is not valid UTF-8: {e}"),
    })?;
    let name = name
        .map(str::to_string)
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| display.clone());
    let mut file = parse_series_str(&text, &display, &name, role, units, aggregator)?;
    file.path = display;
    Ok(file)
}

/// Parses series CSV text.
///
/// The first non-comment line must be the header `t,value`. Lines starting
/// with `#` are skipped. An empty, `NA` or `NaN` value marks a missing year
/// and is skipped with a warning; a non-positive value is rejected with a
/// warning; any other unparsable cell is a format error. Rows sharing a time
/// are collapsed with `aggregator`.
pub fn parse_series_str(
    text: &str,
    source_name: &str,
    name: &str,
    role: Role,
    units: &str,
    aggregator: Aggregator,
) -> Result<SeriesFile> {
    let format_err = |line: u64, message: String| Error::Format {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut warnings = Vec::new();
    let mut rows: Vec<(f64, f64, u64)> = Vec::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            format_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if !header_seen {
            let fields: Vec<String> = record.iter().map(|f| f.to_ascii_lowercase()).collect();
            if fields != ["t", "value"] {
                return Err(format_err(
                    line,
                    format!(
                        "expected header `t,value`, found `{}`",
                        record.iter().collect::<Vec<_>>().join(",")
                    ),
                ));
            }
            header_seen = true;
            continue;
        }
        if record.len() != 2 {
            return Err(format_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let t: f64 = record[0]
            .parse()
            .map_err(|_| format_err(line, format!("time `{}` is not a number", &record[0])))?;
        if !t.is_finite() {
            return Err(format_err(line, format!("time `{}` is not finite", &record[0])));
        }
        let cell = &record[1];
        if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
            warnings.push(format!("line {line}: missing value at t={t}, skipped"));
            continue;
        }
        let value: f64 = cell
            .parse()
            .map_err(|_| format_err(line, format!("value `{cell}` is not a number")))?;
        if !(value.is_finite() && value > 0.0) {
            warnings.push(format!(
                "line {line}: value {cell} at t={t} is not positive and finite, row rejected"
            ));
            continue;
        }
        rows.push((t, value, line));
    }
    if !header_seen {
        return Err(format_err(0, "missing header `t,value`".into()));
    }

    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut observations = Vec::with_capacity(rows.len());
    let mut i = 0;
    while i < rows.len() {
        let t = rows[i].0;
        let mut j = i + 1;
        while j < rows.len() && rows[j].0 == t {
            j += 1;
        }
        let mut values: Vec<f64> = rows[i..j].iter().map(|r| r.1).collect();
        if j - i > 1 {
            let lines: Vec<String> = rows[i..j].iter().map(|r| r.2.to_string()).collect();
            warnings.push(format!(
                "t={t} appears {} times (lines {}), aggregated by {aggregator}",
                j - i,
                lines.join(", ")
            ));
        }
        observations.push(Observation {
            t,
            value: aggregator.apply(&mut values),
        });
        i = j;
    }
    if observations.is_empty() {
        return Err(Error::EmptySeries(source_name.to_string()));
    }
    let parsed = TechSeries::new(name, role, units, observations)?;
    Ok(SeriesFile {
        path: source_name.to_string(),
        parsed,
        warnings,
    })
}

/// Writes a series in the format [`parse_series_str`] reads, values at 12
/// significant digits.
pub fn write_series_csv<W: Write>(series: &TechSeries, mut out: W) -> Result<()> {
    writeln!(out, "# {} ({})", series.name(), series.role())?;
    writeln!(out, "t,value")?;
    for o in series.observations() {
        writeln!(out, "{},{}", fmt_sig(o.t), fmt_sig(o.value))?;
    }
    Ok(())
}
