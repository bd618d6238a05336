//! Series ingestion, report rendering and plot-data files.

mod plot;
mod render;
mod series_csv;

pub use plot::emit_plot_data;
pub use render::{render_report, to_json_bytes, ReportFormat};
pub use series_csv::{parse_series_csv, parse_series_str, write_series_csv, Aggregator, SeriesFile};

use crate::error::Result;
use crate::simulate::SimConfig;

/// Shortest decimal text of `x` after rounding to 12 significant digits.
/// Magnitudes below 1e-5 or from 1e15 up use exponent notation.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // avoid "-0"
    if rounded == 0.0 {
        return "0".into();
    }
    let magnitude = rounded.abs();
    if !(1e-5..1e15).contains(&magnitude) {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

/// Parses and validates a JSON simulation config.
pub fn parse_sim_config(text: &str) -> Result<SimConfig> {
    let config: SimConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}
