//! `bkwg`: fit, compare, evaluate and sample Beta-Kumaraswamy-G models.
//!
//! Exit codes: 0 success, 1 usage, 2 unreadable or invalid data,
//! 3 a fit did not reach the stationarity tolerance.

mod commands;
mod data;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "bkwg", version, about = "Fit, compare, evaluate and sample Beta-Kumaraswamy-G models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum-likelihood fit with standard errors and Wald intervals.
    Fit(FitArgs),
    /// Fit several models and rank them by AIC.
    Compare(CompareArgs),
    /// Evaluate pdf, cdf, sf, hrf, rhrf, chrf or quantile at given points.
    Eval(EvalArgs),
    /// Draw a seeded sample, one value per line.
    Sample(SampleArgs),
    /// Write histogram, density, cdf and hazard curves as CSV files.
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DataSource {
    /// Bundled dataset.
    #[arg(long, value_parser = ["nicotine", "chemo"])]
    pub data: Option<String>,
    /// Whitespace- or comma-separated values; `-` reads stdin.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Baseline family, e.g. exponential, weibull, lomax, dagum.
    #[arg(long, default_value = "weibull")]
    pub baseline: String,
    /// Cumulative hazard shape for the extended_weibull baseline.
    #[arg(long, default_value = "linear")]
    pub shape: String,
}

#[derive(Debug, Args)]
pub struct FitSettings {
    /// Starting points for the optimizer.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub restarts: u32,
    #[arg(long, env = "BKWG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Confidence level of the Wald intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ShapeParams {
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: DataSource,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    /// bkw, kw, beta or baseline.
    #[arg(long, default_value = "bkw")]
    pub model: String,
    #[command(flatten)]
    pub settings: FitSettings,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: DataSource,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    #[arg(long, value_delimiter = ',', default_value = "beta,kw,bkw")]
    pub models: Vec<String>,
    #[command(flatten)]
    pub settings: FitSettings,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub baseline: BaselineArgs,
    #[command(flatten)]
    pub shapes: ShapeParams,
    /// Baseline parameters in the family's order.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub params: Vec<f64>,
    #[arg(long, value_enum)]
    pub what: commands::Quantity,
    /// Evaluation points (probabilities for `quantile`).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required_unless_present = "grid")]
    pub points: Vec<f64>,
    /// Evenly spaced points `from,to,count`.
    #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with = "points")]
    pub grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub baseline: BaselineArgs,
    #[command(flatten)]
    pub shapes: ShapeParams,
    #[arg(long, value_delimiter = ',', required = true)]
    pub params: Vec<f64>,
    #[arg(long)]
    pub count: usize,
    #[arg(long, env = "BKWG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: DataSource,
    #[command(flatten)]
    pub baseline: BaselineArgs,
    /// Model to fit when `--params` is absent.
    #[arg(long, default_value = "bkw")]
    pub model: String,
    #[command(flatten)]
    pub shapes: ShapeParams,
    /// Explicit baseline parameters; skips fitting.
    #[arg(long, value_delimiter = ',')]
    pub params: Option<Vec<f64>>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub restarts: u32,
    #[arg(long, env = "BKWG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Histogram bins; Freedman-Diaconis when absent.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub bins: Option<u32>,
    /// Points on each curve.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
    pub grid_size: u32,
    /// Directory for the CSV files (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Plotdata(a) => commands::plotdata(&a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("warning: the optimizer did not reach the stationarity tolerance");
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
