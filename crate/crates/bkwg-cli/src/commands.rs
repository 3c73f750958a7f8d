use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;

use bkwg::baseline::shape_by_name;
use bkwg::estimation::{fit_mle, FitOptions, FitResult, ModelKind, ModelSpec};
use bkwg::{BKw, Baseline, Dataset, Error, Family, FamilyId};
use clap::ValueEnum;

use crate::data::parse_values;
use crate::output::{human, Cell, Format, Rows};
use crate::{BaselineArgs, CompareArgs, DataSource, EvalArgs, FitArgs, FitSettings, PlotArgs, SampleArgs, ShapeParams};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

fn from_lib(e: Error) -> CliError {
    match e {
        Error::InvalidData(_) => CliError::Data(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Rendered text and whether every fit involved converged.
pub struct Outcome {
    pub text: String,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Pdf,
    Cdf,
    Sf,
    Hrf,
    Rhrf,
    Chrf,
    Quantile,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Pdf => "pdf",
            Quantity::Cdf => "cdf",
            Quantity::Sf => "sf",
            Quantity::Hrf => "hrf",
            Quantity::Rhrf => "rhrf",
            Quantity::Chrf => "chrf",
            Quantity::Quantile => "quantile",
        }
    }
}

const CHEMO_NOTE: &str = "the source describes 46 patients but lists these 45 survival times";

fn load(source: &DataSource) -> Result<Dataset<f64>> {
    if let Some(id) = &source.data {
        return Dataset::bundled(id).map_err(from_lib);
    }
    let path = source.file.as_deref().ok_or_else(|| CliError::Usage("no data source".into()))?;
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Data(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
    };
    let values = parse_values(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Dataset::new(values, path.display().to_string()).map_err(from_lib)
}

fn family(args: &BaselineArgs) -> Result<Family<f64>> {
    let id: FamilyId = args.baseline.parse().map_err(from_lib)?;
    Ok(match id {
        FamilyId::ExtendedWeibull => Family::extended(shape_by_name(&args.shape).map_err(from_lib)?),
        other => Family::from_id(other),
    })
}

fn model_kind(s: &str) -> Result<ModelKind> {
    s.parse().map_err(from_lib)
}

fn explicit_model(args: &BaselineArgs, shapes: &ShapeParams, params: &[f64]) -> Result<BKw<f64>> {
    let g = Baseline::new(family(args)?, params.to_vec()).map_err(from_lib)?;
    BKw::new(shapes.m, shapes.n, shapes.a, shapes.b, g).map_err(from_lib)
}

fn options(restarts: u32, seed: u64, level: f64) -> Result<FitOptions<f64>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Usage(format!("--level must lie in (0, 1), got {level}")));
    }
    Ok(FitOptions {
        restarts: restarts as usize,
        seed,
        level,
        ..FitOptions::default()
    })
}

fn run_fit(spec: &ModelSpec<f64>, data: &Dataset<f64>, opts: &FitOptions<f64>) -> Result<FitResult<f64>> {
    fit_mle(spec, data, opts).map_err(from_lib)
}

fn stationarity_tol(fit: &FitResult<f64>) -> f64 {
    1e-4 * fit.n_obs as f64
}

fn fit_block(fit: &FitResult<f64>, data: &Dataset<f64>, baseline: &str) -> String {
    let pct = format!("{}% CI", human_level(fit.level));
    let mut rows = Rows::new(&["parameter", "estimate", "(se)", &format!("({pct})")]);
    for (i, name) in fit.names.iter().enumerate() {
        let se = fit.std_errors.as_ref().map(|s| format!("({})", human(s[i])));
        let ci = match (&fit.ci_low, &fit.ci_high) {
            (Some(lo), Some(hi)) => Some(format!("({}, {})", human(lo[i]), human(hi[i]))),
            _ => None,
        };
        rows.push(vec![name.as_str().into(), fit.estimates[i].into(), se.into(), ci.into()]);
    }
    let mut out = format!(
        "model {} ({} baseline), data {} ({} observations)\n",
        fit.label(),
        baseline,
        data.label,
        data.len()
    );
    out.push_str(&rows.table());
    out.push_str(&format!("log-likelihood  {:.4}\n", fit.loglik));
    out.push_str(&format!("AIC             {:.4}\n", fit.aic));
    out.push_str(&format!(
        "converged       {} (max |score| {}, tolerance {})\n",
        if fit.converged { "yes" } else { "no" },
        human(fit.grad_norm),
        human(stationarity_tol(fit))
    ));
    if fit.std_errors.is_none() {
        out.push_str("standard errors unavailable: observed information is singular\n");
    }
    out
}

fn human_level(level: f64) -> String {
    let p = level * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}", p.round())
    } else {
        format!("{}", (p * 1e6).round() / 1e6)
    }
}

const TIDY_HEADER: [&str; 10] = [
    "model", "n_obs", "loglik", "aic", "converged", "parameter", "estimate", "se", "ci_low", "ci_high",
];

fn tidy_rows(fit: &FitResult<f64>, prefix: &[Cell]) -> Vec<Vec<Cell>> {
    (0..fit.names.len())
        .map(|i| {
            let mut row = prefix.to_vec();
            row.extend([
                fit.label().into(),
                fit.n_obs.into(),
                fit.loglik.into(),
                fit.aic.into(),
                fit.converged.into(),
                fit.names[i].as_str().into(),
                fit.estimates[i].into(),
                fit.std_errors.as_ref().map(|s| s[i]).into(),
                fit.ci_low.as_ref().map(|s| s[i]).into(),
                fit.ci_high.as_ref().map(|s| s[i]).into(),
            ]);
            row
        })
        .collect()
}

fn note_for(data: &Dataset<f64>) -> Option<&'static str> {
    (data.label == "chemo").then_some(CHEMO_NOTE)
}

fn render_fits(fits: &[FitResult<f64>], data: &Dataset<f64>, baseline: &str, s: &FitSettings, ranked: bool) -> String {
    let best = fits
        .iter()
        .map(|f| f.aic)
        .fold(f64::INFINITY, f64::min);
    match s.format {
        Format::Table => {
            let mut out = String::new();
            if ranked {
                let mut rank = Rows::new(&["rank", "model", "k", "log-likelihood", "AIC", "delta AIC", "converged", ""]);
                for (i, f) in fits.iter().enumerate() {
                    rank.push(vec![
                        (i + 1).into(),
                        f.label().into(),
                        f.estimates.len().into(),
                        format!("{:.4}", f.loglik).into(),
                        format!("{:.4}", f.aic).into(),
                        format!("{:.4}", f.aic - best).into(),
                        f.converged.into(),
                        if f.aic == best { "* min AIC" } else { "" }.into(),
                    ]);
                }
                out.push_str(&rank.table());
                out.push('\n');
            }
            for (i, f) in fits.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&fit_block(f, data, baseline));
            }
            if let Some(note) = note_for(data) {
                out.push_str(&format!("note: {note}\n"));
            }
            out
        }
        Format::Csv | Format::Jsonl => {
            let header: Vec<&str> = if ranked {
                ["rank", "min_aic"].into_iter().chain(TIDY_HEADER).collect()
            } else {
                TIDY_HEADER.to_vec()
            };
            let mut rows = Rows::new(&header);
            for (i, f) in fits.iter().enumerate() {
                let prefix: Vec<Cell> = if ranked {
                    vec![(i + 1).into(), (f.aic == best).into()]
                } else {
                    Vec::new()
                };
                for r in tidy_rows(f, &prefix) {
                    rows.push(r);
                }
            }
            let mut out = rows.render(s.format);
            if s.format == Format::Jsonl {
                if let Some(note) = note_for(data) {
                    out.push_str(&serde_json::json!({ "data": data.label, "note": note }).to_string());
                    out.push('\n');
                }
            }
            out
        }
    }
}

pub fn fit(args: &FitArgs) -> Result<Outcome> {
    let data = load(&args.source)?;
    let spec = ModelSpec::new(model_kind(&args.model)?, family(&args.baseline)?);
    let s = &args.settings;
    let f = run_fit(&spec, &data, &options(s.restarts, s.seed, s.level)?)?;
    let converged = f.converged;
    Ok(Outcome {
        text: render_fits(&[f], &data, &args.baseline.baseline, s, false),
        converged,
    })
}

pub fn compare(args: &CompareArgs) -> Result<Outcome> {
    let data = load(&args.source)?;
    let fam = family(&args.baseline)?;
    let s = &args.settings;
    let opts = options(s.restarts, s.seed, s.level)?;
    let kinds: Vec<ModelKind> = args.models.iter().map(|m| model_kind(m)).collect::<Result<_>>()?;
    if kinds.is_empty() {
        return Err(CliError::Usage("--models is empty".into()));
    }
    let mut fits = Vec::new();
    let mut failures = String::new();
    for kind in kinds {
        match run_fit(&ModelSpec::new(kind, fam.clone()), &data, &opts) {
            Ok(f) => fits.push(f),
            Err(e) => failures.push_str(&format!("{kind}: {e}\n")),
        }
    }
    if fits.is_empty() {
        return Err(CliError::Data(failures.trim_end().to_string()));
    }
    // stable sort keeps the requested order on ties
    fits.sort_by(|x, y| x.aic.partial_cmp(&y.aic).unwrap_or(std::cmp::Ordering::Equal));
    let converged = failures.is_empty() && fits.iter().all(|f| f.converged);
    let mut text = render_fits(&fits, &data, &args.baseline.baseline, s, true);
    if !failures.is_empty() {
        eprint!("{failures}");
    }
    if s.format == Format::Table && !failures.is_empty() {
        text.push_str(&format!("failed fits:\n{failures}"));
    }
    Ok(Outcome { text, converged })
}

pub fn eval(args: &EvalArgs) -> Result<Outcome> {
    let d = explicit_model(&args.baseline, &args.shapes, &args.params)?;
    let points = match &args.grid {
        Some(g) => {
            let [from, to, count] = g[..] else {
                return Err(CliError::Usage("--grid takes from,to,count".into()));
            };
            if count < 1.0 || count.fract() != 0.0 {
                return Err(CliError::Usage("--grid count must be a positive integer".into()));
            }
            let k = count as usize;
            if k == 1 {
                vec![from]
            } else {
                (0..k).map(|i| from + (to - from) * i as f64 / (k - 1) as f64).collect()
            }
        }
        None => args.points.clone(),
    };
    let q = args.what;
    let mut rows = Rows::new(&[if q == Quantity::Quantile { "p" } else { "t" }, q.name()]);
    for &x in &points {
        let v = match q {
            Quantity::Pdf => d.pdf(x),
            Quantity::Cdf => d.cdf(x),
            Quantity::Sf => d.sf(x),
            Quantity::Hrf => d.hrf(x),
            Quantity::Rhrf => d.rhrf(x),
            Quantity::Chrf => d.chrf(x),
            Quantity::Quantile => d.quantile(x).map_err(from_lib)?,
        };
        rows.push(vec![x.into(), v.into()]);
    }
    Ok(Outcome {
        text: rows.render(args.format),
        converged: true,
    })
}

pub fn sample(args: &SampleArgs) -> Result<Outcome> {
    let d = explicit_model(&args.baseline, &args.shapes, &args.params)?;
    let draws = d.sample(args.count, args.seed).map_err(from_lib)?;
    let mut text = String::new();
    for v in draws {
        text.push_str(&format!("{v}\n"));
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Outcome {
                text: String::new(),
                converged: true,
            })
        }
        None => Ok(Outcome { text, converged: true }),
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let (lo, frac) = (h.floor() as usize, h.fract());
    match sorted.get(lo + 1) {
        Some(&next) => sorted[lo] + frac * (next - sorted[lo]),
        None => sorted[lo],
    }
}

/// Freedman-Diaconis bin count, falling back to Sturges when the IQR is zero.
fn fd_bins(sorted: &[f64]) -> usize {
    let n = sorted.len() as f64;
    let range = sorted[sorted.len() - 1] - sorted[0];
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    if range <= 0.0 {
        return 1;
    }
    if iqr <= 0.0 {
        return (n.log2().ceil() as usize + 1).max(1);
    }
    let width = 2.0 * iqr / n.cbrt();
    ((range / width).ceil() as usize).clamp(1, 1000)
}

struct Histogram {
    edges: Vec<f64>,
    counts: Vec<usize>,
}

fn histogram(sorted: &[f64], bins: usize) -> Histogram {
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
    let mut counts = vec![0usize; bins];
    for &v in sorted {
        let k = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

fn write_csv(dir: &Path, name: &str, rows: &Rows) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, rows.csv()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn plotdata(args: &PlotArgs) -> Result<Outcome> {
    let data = load(&args.source)?;
    let (model, converged, label) = match &args.params {
        Some(p) => (explicit_model(&args.baseline, &args.shapes, p)?, true, "explicit".to_string()),
        None => {
            let spec = ModelSpec::new(model_kind(&args.model)?, family(&args.baseline)?);
            let f = run_fit(&spec, &data, &options(args.restarts, args.seed, 0.95)?)?;
            (f.model.clone(), f.converged, f.label())
        }
    };
    let mut sorted = data.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let nobs = sorted.len();
    let bins = args.bins.map_or_else(|| fd_bins(&sorted), |b| b as usize);
    let hist = histogram(&sorted, bins);

    fs::create_dir_all(&args.out).map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;

    let mut h = Rows::new(&["bin_low", "bin_high", "count", "density"]);
    for (i, &c) in hist.counts.iter().enumerate() {
        let (l, r) = (hist.edges[i], hist.edges[i + 1]);
        h.push(vec![l.into(), r.into(), c.into(), (c as f64 / (nobs as f64 * (r - l))).into()]);
    }
    write_csv(&args.out, "histogram.csv", &h)?;

    let (dmin, dmax) = (sorted[0], sorted[nobs - 1]);
    let pad = 0.05 * (dmax - dmin).max(dmax.abs() * 1e-3).max(1e-12);
    let low = model.support_low();
    let mut from = dmin - pad;
    let to = dmax + pad;
    if from <= low {
        // stay off the support edge, where the density may be infinite
        from = low + 1e-3 * (to - low);
    }
    let k = args.grid_size as usize;
    let grid: Vec<f64> = (0..k).map(|i| from + (to - from) * i as f64 / (k - 1) as f64).collect();
    let curve = |name: &str, f: &dyn Fn(f64) -> f64| {
        let mut r = Rows::new(&["t", name]);
        for &t in &grid {
            r.push(vec![t.into(), f(t).into()]);
        }
        r
    };
    write_csv(&args.out, "pdf.csv", &curve("pdf", &|t| model.pdf(t)))?;
    write_csv(&args.out, "cdf.csv", &curve("cdf", &|t| model.cdf(t)))?;
    write_csv(&args.out, "hazard.csv", &curve("hrf", &|t| model.hrf(t)))?;

    let mut e = Rows::new(&["t", "ecdf", "cdf"]);
    let mut i = 0;
    while i < nobs {
        let v = sorted[i];
        while i < nobs && sorted[i] == v {
            i += 1;
        }
        e.push(vec![v.into(), (i as f64 / nobs as f64).into(), model.cdf(v).into()]);
    }
    write_csv(&args.out, "ecdf.csv", &e)?;

    let mut summary = Rows::new(&["model", "m", "n", "a", "b", "baseline", "bins", "directory"]);
    let base: Vec<String> = model.baseline().params().iter().map(|v| format!("{v}")).collect();
    summary.push(vec![
        label.into(),
        model.m().into(),
        model.n().into(),
        model.a().into(),
        model.b().into(),
        format!("{}({})", model.baseline().id(), base.join(", ")).into(),
        bins.into(),
        args.out.display().to_string().into(),
    ]);
    let mut text = summary.table();
    if let Some(note) = note_for(&data) {
        text.push_str(&format!("note: {note}\n"));
    }
    Ok(Outcome { text, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_bins_and_histogram_normalize() {
        let mut v: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin().abs() * 3.0).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let bins = fd_bins(&v);
        assert!(bins >= 2);
        let h = histogram(&v, bins);
        assert_eq!(h.counts.iter().sum::<usize>(), 100);
        let mass: f64 = h
            .counts
            .iter()
            .map(|&c| c as f64 / 100.0)
            .sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_data_gets_one_bin() {
        let v = vec![2.0; 5];
        assert_eq!(fd_bins(&v), 1);
        let h = histogram(&v, 1);
        assert_eq!(h.counts, vec![5]);
    }

    #[test]
    fn level_labels() {
        assert_eq!(human_level(0.95), "95");
        assert_eq!(human_level(0.975), "97.5");
    }
}
