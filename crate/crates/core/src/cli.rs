//! Command-line front end.
//!
//! Exit codes: 0 success, 2 data or validation error, 3 fit failure,
//! 4 usage error. Every failure writes one line `error[CODE]: message` to
//! the error stream.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{build_report, correlation_matrix, ReportInputs, ReportOptions};
use crate::io::{
    emit_plot_data, fmt_sig, parse_series_csv, parse_sim_config, render_report, to_json_bytes, write_series_csv,
    Aggregator, ReportFormat,
};
use crate::logistic::{fit_logistic, forecast_series, LogisticParams, DEFAULT_K_MAX_FACTOR};
use crate::scale::{classify_point, classify_with_test, DEFAULT_ALPHA};
use crate::series::{Role, TechSeries};
use crate::simulate::{monte_carlo_recovery, simulate_series, sub_seed};
use crate::statkit::{descriptive, zscore};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_FIT: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

pub const SEED_ENV: &str = "PARASITECH_SEED";

#[derive(Debug, Parser)]
#[command(name = "parasitech", version, about = "Host-parasite technology evolution analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate ln P = ln A + B ln H for each parasite and grade B
    Evolve(EvolveArgs),
    /// Regress the first parasite on the host and the other parasites
    EvolveMulti(EvolveMultiArgs),
    /// Fit a logistic growth curve (K, a, b) to one series
    FitLogistic(FitLogisticArgs),
    /// Extrapolate a fitted logistic curve
    Forecast(ForecastArgs),
    /// Pearson correlation matrix of log values, pairwise deletion
    Correlate(CorrelateArgs),
    /// Grade an evolutionary coefficient B on the evolution scale
    Classify(ClassifyArgs),
    /// Write a synthetic host and parasite pair as series CSV files
    Simulate(SimulateArgs),
    /// Monte Carlo recovery of B = b2/b1 from a simulation config
    Recover(RecoverArgs),
    /// Descriptive statistics of one series
    Stats(StatsArgs),
    /// Z-score one series
    Standardize(StandardizeArgs),
}

#[derive(Debug, Args)]
struct InputOpts {
    /// Rule for rows sharing a time stamp: mean, median or max
    #[arg(long, default_value = "mean", value_parser = parse_aggregator)]
    aggregator: Aggregator,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Host series CSV (t,value)
    #[arg(long)]
    host: PathBuf,
    /// Parasite series CSV; repeat for several parasites
    #[arg(long, required = true)]
    parasite: Vec<PathBuf>,
    /// Significance level of the test of B = 1
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Output format: text, json or csv
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    /// Also write plot CSVs with this path prefix
    #[arg(long, value_name = "PREFIX")]
    plot_data: Option<String>,
    /// Include the correlation matrix of all series
    #[arg(long, default_value_t = false)]
    correlations: bool,
    #[command(flatten)]
    input: InputOpts,
}

#[derive(Debug, Args)]
struct EvolveMultiArgs {
    /// Host series CSV (t,value)
    #[arg(long)]
    host: PathBuf,
    /// Parasite series CSV; the first is the regression target, repeat at least twice
    #[arg(long, required = true, num_args = 1)]
    parasite: Vec<PathBuf>,
    /// Significance level
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Output format: text, json or csv
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    /// Also write plot CSVs with this path prefix
    #[arg(long, value_name = "PREFIX")]
    plot_data: Option<String>,
    /// Also fit each parasite on the host alone
    #[arg(long, default_value_t = false)]
    simple_fits: bool,
    #[command(flatten)]
    input: InputOpts,
}

#[derive(Debug, Args)]
struct FitLogisticArgs {
    /// Series CSV (t,value)
    #[arg(long)]
    input: PathBuf,
    /// Upper end of the K search as a multiple of the largest value
    #[arg(long, default_value_t = DEFAULT_K_MAX_FACTOR)]
    k_max_factor: f64,
    /// Output format: text or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    #[command(flatten)]
    input_opts: InputOpts,
}

#[derive(Debug, Args)]
struct ForecastArgs {
    /// Series CSV (t,value)
    #[arg(long)]
    input: PathBuf,
    /// Last time to forecast
    #[arg(long)]
    to: f64,
    /// Spacing of forecast times, starting after the last observation
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Upper end of the K search as a multiple of the largest value
    #[arg(long, default_value_t = DEFAULT_K_MAX_FACTOR)]
    k_max_factor: f64,
    /// Output format: text (CSV rows) or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    #[command(flatten)]
    input_opts: InputOpts,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    /// Series CSV; repeat at least twice
    #[arg(long, required = true)]
    series: Vec<PathBuf>,
    /// Output format: text or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    #[command(flatten)]
    input: InputOpts,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Evolutionary coefficient B
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    /// Standard error of B; with --n switches to the t-test of B = 1
    #[arg(long, requires = "n")]
    se: Option<f64>,
    /// Sample size behind B
    #[arg(long, requires = "se")]
    n: Option<usize>,
    /// Significance level of the t-test
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Output format: text or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Host saturation level K1
    #[arg(long)]
    k1: f64,
    /// Host growth rate b1
    #[arg(long)]
    b1: f64,
    /// Host inflection time t1
    #[arg(long, allow_negative_numbers = true)]
    t1: f64,
    /// Parasite saturation level K2
    #[arg(long)]
    k2: f64,
    /// Parasite growth rate b2
    #[arg(long)]
    b2: f64,
    /// Parasite inflection time t2
    #[arg(long, allow_negative_numbers = true)]
    t2: f64,
    /// First grid time
    #[arg(long, allow_negative_numbers = true)]
    t_start: f64,
    /// Last grid time
    #[arg(long, allow_negative_numbers = true)]
    t_end: f64,
    /// Number of grid points
    #[arg(long)]
    n: usize,
    /// Lognormal noise sd in log space
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Probability that a point is dropped
    #[arg(long, default_value_t = 0.0)]
    missing: f64,
    /// RNG seed
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Writes <PREFIX>_host.csv and <PREFIX>_parasite.csv
    #[arg(long, value_name = "PREFIX")]
    out_prefix: String,
}

#[derive(Debug, Args)]
struct RecoverArgs {
    /// Simulation config JSON
    #[arg(long)]
    config: PathBuf,
    /// Number of replicates
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    /// Fit only grid points where every curve is below the early-phase threshold
    #[arg(long, default_value_t = false)]
    early_phase: bool,
    /// RNG seed; overrides the config, which overrides $PARASITECH_SEED
    #[arg(long)]
    seed: Option<u64>,
    /// Output format: text or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Series CSV (t,value)
    #[arg(long)]
    input: PathBuf,
    /// Use natural logs of the values
    #[arg(long, default_value_t = false)]
    log: bool,
    /// Output format: text or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    #[command(flatten)]
    input_opts: InputOpts,
}

#[derive(Debug, Args)]
struct StandardizeArgs {
    /// Series CSV (t,value)
    #[arg(long)]
    input: PathBuf,
    /// Output format: text (CSV rows) or json
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
    #[command(flatten)]
    input_opts: InputOpts,
}

fn parse_aggregator(s: &str) -> std::result::Result<Aggregator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "error[USAGE]: {first}");
            let _ = write!(stderr, "{rendered}");
            return EXIT_USAGE;
        }
    };
    let mut ctx = Ctx { stdout, stderr };
    match dispatch(cli.command, &mut ctx) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(ctx.stderr, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

struct Ctx<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn load(&mut self, path: &Path, role: Role, aggregator: Aggregator) -> Result<TechSeries> {
        let file = parse_series_csv(path, None, role, "", aggregator)?;
        for w in &file.warnings {
            writeln!(self.stderr, "warning: {}: {w}", file.path)?;
        }
        Ok(file.parsed)
    }

    fn out(&mut self, bytes: &[u8]) -> Result<()> {
        self.stdout.write_all(bytes)?;
        Ok(())
    }
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Report timestamp: `SOURCE_DATE_EPOCH` when set, otherwise the clock.
fn timestamp() -> String {
    use chrono::{DateTime, SecondsFormat, Utc};
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn require_text_or_json(format: ReportFormat) -> Result<()> {
    if format == ReportFormat::Csv {
        return Err(Error::invalid("this command supports --format text or json"));
    }
    Ok(())
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> Result<()> {
    match command {
        Command::Evolve(a) => {
            let host = ctx.load(&a.host, Role::Host, a.input.aggregator)?;
            let parasites = a
                .parasite
                .iter()
                .map(|p| ctx.load(p, Role::Parasite, a.input.aggregator))
                .collect::<Result<Vec<_>>>()?;
            let options = ReportOptions {
                alpha: a.alpha,
                fit_each_parasite: true,
                multi: false,
                correlations: a.correlations,
                aggregator: a.input.aggregator.to_string(),
            };
            let sources = std::iter::once(&a.host)
                .chain(&a.parasite)
                .map(|p| file_label(p))
                .collect();
            report_command(
                ctx,
                &host,
                &parasites,
                sources,
                options,
                a.format,
                a.plot_data.as_deref(),
            )
        }
        Command::EvolveMulti(a) => {
            if a.parasite.len() < 2 {
                return Err(Error::invalid("evolve-multi needs at least two --parasite series"));
            }
            let host = ctx.load(&a.host, Role::Host, a.input.aggregator)?;
            let parasites = a
                .parasite
                .iter()
                .map(|p| ctx.load(p, Role::Parasite, a.input.aggregator))
                .collect::<Result<Vec<_>>>()?;
            let options = ReportOptions {
                alpha: a.alpha,
                fit_each_parasite: a.simple_fits,
                multi: true,
                correlations: true,
                aggregator: a.input.aggregator.to_string(),
            };
            let sources = std::iter::once(&a.host)
                .chain(&a.parasite)
                .map(|p| file_label(p))
                .collect();
            report_command(
                ctx,
                &host,
                &parasites,
                sources,
                options,
                a.format,
                a.plot_data.as_deref(),
            )
        }
        Command::FitLogistic(a) => {
            require_text_or_json(a.format)?;
            let series = ctx.load(&a.input, Role::Host, a.input_opts.aggregator)?;
            let fit = fit_logistic(&series, a.k_max_factor).map_err(|e| e.context(file_label(&a.input)))?;
            if a.format == ReportFormat::Json {
                return ctx.out(&to_json_bytes(&fit)?);
            }
            let p = &fit.params;
            let text = format!(
                "series: {} (n = {})\nK = {}\na = {}\nb = {}\ninflection t* = a/b = {}\nR² (logit) = {}\nK at search bound: {}\n",
                series.name(),
                fit.n,
                fmt_sig(p.k),
                fmt_sig(p.a),
                fmt_sig(p.b),
                fmt_sig(p.inflection_time()),
                fmt_sig(fit.r2_logit),
                if fit.k_at_bound { "yes" } else { "no" },
            );
            ctx.out(text.as_bytes())
        }
        Command::Forecast(a) => {
            require_text_or_json(a.format)?;
            if !(a.step.is_finite() && a.step > 0.0) {
                return Err(Error::invalid(format!("--step must be positive, got {}", a.step)));
            }
            if !a.to.is_finite() {
                return Err(Error::invalid("--to must be finite"));
            }
            let series = ctx.load(&a.input, Role::Host, a.input_opts.aggregator)?;
            let fit = fit_logistic(&series, a.k_max_factor).map_err(|e| e.context(file_label(&a.input)))?;
            let last = *series.times().last().expect("non-empty series");
            let mut horizon = Vec::new();
            let mut i = 1u64;
            loop {
                let t = last + a.step * i as f64;
                if t > a.to + 1e-9 * a.step {
                    break;
                }
                horizon.push(t);
                i += 1;
            }
            let points = forecast_series(&fit, &horizon);
            if a.format == ReportFormat::Json {
                #[derive(Serialize)]
                struct Forecast<'a> {
                    fit: &'a crate::logistic::LogisticFitReport,
                    forecast: Vec<[f64; 2]>,
                }
                let forecast = points.iter().map(|(t, v)| [*t, *v]).collect();
                return ctx.out(&to_json_bytes(&Forecast { fit: &fit, forecast })?);
            }
            let p = &fit.params;
            let mut text = format!(
                "# forecast of {} | K={} a={} b={} | R2 logit={} | K at bound={}\nt,value\n",
                series.name(),
                fmt_sig(p.k),
                fmt_sig(p.a),
                fmt_sig(p.b),
                fmt_sig(fit.r2_logit),
                fit.k_at_bound
            );
            for (t, v) in points {
                text.push_str(&format!("{},{}\n", fmt_sig(t), fmt_sig(v)));
            }
            ctx.out(text.as_bytes())
        }
        Command::Correlate(a) => {
            require_text_or_json(a.format)?;
            let series = a
                .series
                .iter()
                .map(|p| ctx.load(p, Role::Parasite, a.input.aggregator))
                .collect::<Result<Vec<_>>>()?;
            let matrix = correlation_matrix(&series)?;
            if a.format == ReportFormat::Json {
                return ctx.out(&to_json_bytes(&matrix)?);
            }
            let mut text = String::from("series_a,series_b,r,p,n\n");
            for i in 0..matrix.series.len() {
                for j in i + 1..matrix.series.len() {
                    let e = matrix.entries[i][j];
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        matrix.series[i],
                        matrix.series[j],
                        e.r.map(fmt_sig).unwrap_or_else(|| "NA".into()),
                        e.p.map(fmt_sig).unwrap_or_else(|| "NA".into()),
                        e.n
                    ));
                }
            }
            ctx.out(text.as_bytes())
        }
        Command::Classify(a) => {
            require_text_or_json(a.format)?;
            let class = match (a.se, a.n) {
                (Some(se), Some(n)) => classify_with_test(a.b, se, n, a.alpha)?,
                _ => classify_point(a.b)?,
            };
            if a.format == ReportFormat::Json {
                return ctx.out(&to_json_bytes(&class)?);
            }
            let mut text = format!(
                "B = {}: grade {} ({}), {}, {} {}\n{}\n",
                fmt_sig(a.b),
                class.grade,
                class.grade_name(),
                class.mode,
                class.evolution_label,
                class.symbol,
                class.prediction
            );
            if let Some(t) = &class.test {
                text.push_str(&format!(
                    "t-test of B = 1: t = {}, df = {}, p = {}, alpha = {}\n",
                    fmt_sig(t.t_stat),
                    t.df,
                    fmt_sig(t.p_value),
                    t.alpha
                ));
            }
            if class.negative_b {
                writeln!(ctx.stderr, "warning: negative B lies outside the scale; graded 1")?;
            }
            ctx.out(text.as_bytes())
        }
        Command::Simulate(a) => {
            let host = LogisticParams::from_inflection(a.k1, a.b1, a.t1)?;
            let parasite = LogisticParams::from_inflection(a.k2, a.b2, a.t2)?;
            let config = crate::simulate::SimConfig {
                host,
                parasites: vec![parasite],
                t_start: a.t_start,
                t_end: a.t_end,
                n_points: a.n,
                noise_sigma: a.noise,
                missing_prob: a.missing,
                seed: a.seed,
                early_phase_threshold: crate::simulate::DEFAULT_EARLY_PHASE_THRESHOLD,
            };
            config.validate()?;
            let grid = config.grid();
            let outputs = [
                ("host", Role::Host, host, 0u64),
                ("parasite", Role::Parasite, parasite, 1u64),
            ];
            for (label, role, params, index) in outputs {
                let series = simulate_series(
                    label,
                    role,
                    &params,
                    &grid,
                    a.noise,
                    a.missing,
                    sub_seed(a.seed, index, 0),
                )?;
                let path = format!("{}_{label}.csv", a.out_prefix);
                let file = std::fs::File::create(&path).map_err(|e| Error::from(e).context(path.clone()))?;
                let mut w = std::io::BufWriter::new(file);
                write_series_csv(&series, &mut w)?;
                w.flush()?;
                writeln!(ctx.stdout, "{path}")?;
            }
            Ok(())
        }
        Command::Recover(a) => {
            require_text_or_json(a.format)?;
            let label = file_label(&a.config);
            let text = std::fs::read_to_string(&a.config).map_err(|e| Error::from(e).context(label.clone()))?;
            let mut config = parse_sim_config(&text).map_err(|e| e.context(label.clone()))?;
            let config_has_seed = serde_json::from_str::<serde_json::Value>(&text)
                .ok()
                .and_then(|v| v.get("seed").cloned())
                .is_some();
            if let Some(seed) = a.seed {
                config.seed = seed;
            } else if !config_has_seed {
                if let Ok(s) = std::env::var(SEED_ENV) {
                    config.seed = s
                        .trim()
                        .parse()
                        .map_err(|_| Error::invalid(format!("{SEED_ENV}=`{s}` is not an unsigned integer")))?;
                }
            }
            let summary = monte_carlo_recovery(&config, a.replicates, a.early_phase)?;
            if a.format == ReportFormat::Json {
                return ctx.out(&to_json_bytes(&summary)?);
            }
            let text = format!(
                "replicates: {} ({} failed, {} perfect fits)\ntrue B: {}\nmean B: {}\nbias: {}\nrmse: {}\n95% interval coverage: {}\n",
                summary.replicates,
                summary.failures,
                summary.perfect_fits,
                fmt_sig(summary.true_b),
                fmt_sig(summary.mean_estimate),
                fmt_sig(summary.bias),
                fmt_sig(summary.rmse),
                fmt_sig(summary.coverage_95)
            );
            ctx.out(text.as_bytes())
        }
        Command::Stats(a) => {
            require_text_or_json(a.format)?;
            let series = ctx.load(&a.input, Role::Host, a.input_opts.aggregator)?;
            let values = if a.log { series.log_values() } else { series.values() };
            let d = descriptive(&values)?;
            if a.format == ReportFormat::Json {
                return ctx.out(&to_json_bytes(&d)?);
            }
            let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_else(|| "undefined".into());
            let text = format!(
                "series: {}{}\nn: {}\nmean: {}\nsd: {}\nskewness: {}\nkurtosis: {}\n",
                series.name(),
                if a.log { " (natural log)" } else { "" },
                d.n,
                fmt_sig(d.mean),
                fmt_sig(d.sd),
                opt(d.skewness),
                opt(d.kurtosis)
            );
            ctx.out(text.as_bytes())
        }
        Command::Standardize(a) => {
            require_text_or_json(a.format)?;
            let series = ctx.load(&a.input, Role::Host, a.input_opts.aggregator)?;
            let z = zscore(&series.values()).map_err(|e| e.context(series.name().to_string()))?;
            let times = series.times();
            if a.format == ReportFormat::Json {
                #[derive(Serialize)]
                struct Standardized<'a> {
                    name: &'a str,
                    times: &'a [f64],
                    z: &'a [f64],
                }
                return ctx.out(&to_json_bytes(&Standardized {
                    name: series.name(),
                    times: &times,
                    z: &z,
                })?);
            }
            let mut text = String::from("t,z\n");
            for (t, z) in times.iter().zip(&z) {
                text.push_str(&format!("{},{}\n", fmt_sig(*t), fmt_sig(*z)));
            }
            ctx.out(text.as_bytes())
        }
    }
}

fn report_command(
    ctx: &mut Ctx<'_>,
    host: &TechSeries,
    parasites: &[TechSeries],
    sources: Vec<String>,
    options: ReportOptions,
    format: ReportFormat,
    plot_prefix: Option<&str>,
) -> Result<()> {
    let report = build_report(
        ReportInputs {
            host,
            parasites,
            sources,
            generated_at: Some(timestamp()),
        },
        options,
    )?;
    if let Some(prefix) = plot_prefix {
        for path in emit_plot_data(&report, prefix)? {
            writeln!(ctx.stderr, "wrote {}", path.display())?;
        }
    }
    ctx.out(&render_report(&report, format)?)
}
