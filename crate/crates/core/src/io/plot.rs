use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use super::fmt_sig;
use crate::error::{Error, Result};
use crate::evolution::AnalysisReport;

/// Writes plot-ready CSVs next to `path_prefix`:
///
/// * `<prefix>_fit<i>.csv` per host-parasite fit: `t,log_host,log_parasite,log_parasite_fitted`
/// * `<prefix>_trajectories.csv`: `t` then one z-score column per series,
///   blank where a series has no observation.
pub fn emit_plot_data(report: &AnalysisReport, path_prefix: &str) -> Result<Vec<PathBuf>> {
    if report.fits.is_empty() && report.multi_fits.is_empty() {
        return Err(Error::invalid("report has no fits to plot"));
    }
    let mut written = Vec::new();
    for (i, fit) in report.fits.iter().enumerate() {
        let path = PathBuf::from(format!("{path_prefix}_fit{}.csv", i + 1));
        let mut out = create(&path)?;
        writeln!(out, "t,log_host,log_parasite,log_parasite_fitted")?;
        for ((t, lh), lp) in fit.years_used.iter().zip(&fit.log_host).zip(&fit.log_parasite) {
            let fitted = fit.log_a + fit.b * lh;
            writeln!(
                out,
                "{},{},{},{}",
                fmt_sig(*t),
                fmt_sig(*lh),
                fmt_sig(*lp),
                fmt_sig(fitted)
            )?;
        }
        out.flush()?;
        written.push(path);
    }

    let path = PathBuf::from(format!("{path_prefix}_trajectories.csv"));
    let mut rows: BTreeMap<u64, (f64, Vec<Option<f64>>)> = BTreeMap::new();
    let m = report.standardized_trajectories.len();
    for (j, traj) in report.standardized_trajectories.iter().enumerate() {
        for (t, z) in traj.times.iter().zip(&traj.z) {
            let key = crate::evolution::time_key(*t);
            rows.entry(key).or_insert_with(|| (*t, vec![None; m])).1[j] = Some(*z);
        }
    }
    let mut out = create(&path)?;
    let header: Vec<&str> = std::iter::once("t")
        .chain(report.standardized_trajectories.iter().map(|t| t.name.as_str()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (t, zs) in rows.values() {
        let cells: Vec<String> = zs.iter().map(|z| z.map(fmt_sig).unwrap_or_default()).collect();
        writeln!(out, "{},{}", fmt_sig(*t), cells.join(","))?;
    }
    out.flush()?;
    written.push(path);
    Ok(written)
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::from(e).context(path.display().to_string()))
}
