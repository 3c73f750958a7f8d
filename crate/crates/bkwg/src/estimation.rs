//! Likelihood fitting of BKw-G models and their nested sub-models, standard
//! errors from the observed information, Wald intervals, AIC, and the
//! moment estimator based on `E[W^v] = B(m + v, n) / B(m, n)`.
//!
//! The full parameter vector is always `(m, n, a, b, baseline...)`. A
//! [`ModelSpec`] decides which of the generator shapes are free; fixed
//! shapes are held at 1 and excluded from scores and information matrices.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baseline::{Baseline, Family};
use crate::bkw::BKw;
use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::optim::{bfgs, nelder_mead, newton_polish, projected, Minimum};
use crate::real::{exprel, Real};
use crate::rng::UniformStream;
use crate::specialfn::{lbeta, normal_quantile, psi, psi1};

const GENERATOR_NAMES: [&str; 4] = ["m", "n", "a", "b"];

/// Which generator shapes are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `m, n, a, b` all free.
    BKw,
    /// `m = n = 1`: Kumaraswamy-G.
    Kw,
    /// `a = b = 1`: beta-G.
    Beta,
    /// All four fixed at 1: the baseline itself.
    BaselineOnly,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::BKw, ModelKind::Kw, ModelKind::Beta, ModelKind::BaselineOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::BKw => "bkw",
            ModelKind::Kw => "kw",
            ModelKind::Beta => "beta",
            ModelKind::BaselineOnly => "baseline",
        }
    }

    /// Indices into `(m, n, a, b)` that are free.
    pub fn free_generators(self) -> &'static [usize] {
        match self {
            ModelKind::BKw => &[0, 1, 2, 3],
            ModelKind::Kw => &[2, 3],
            ModelKind::Beta => &[0, 1],
            ModelKind::BaselineOnly => &[],
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            ModelKind::BKw => "BKw-",
            ModelKind::Kw => "Kw-",
            ModelKind::Beta => "B-",
            ModelKind::BaselineOnly => "",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bkw" => Ok(ModelKind::BKw),
            "kw" => Ok(ModelKind::Kw),
            "beta" | "b" => Ok(ModelKind::Beta),
            "baseline" | "base" => Ok(ModelKind::BaselineOnly),
            other => domain(format!("unknown model `{other}` (expected bkw, kw, beta or baseline)")),
        }
    }
}

/// A model: which shapes are free, over which baseline family.
#[derive(Debug, Clone)]
pub struct ModelSpec<T: Real> {
    pub kind: ModelKind,
    pub family: Family<T>,
}

impl<T: Real> ModelSpec<T> {
    pub fn new(kind: ModelKind, family: Family<T>) -> Self {
        Self { kind, family }
    }

    /// Label such as `BKw-W`.
    pub fn label(&self) -> String {
        let s = self.family.id().short();
        match self.kind {
            ModelKind::BaselineOnly => s.to_string(),
            k => format!("{}{}", k.prefix(), s),
        }
    }

    pub fn free_names(&self) -> Vec<String> {
        self.kind
            .free_generators()
            .iter()
            .map(|&i| GENERATOR_NAMES[i].to_string())
            .chain(self.family.param_names())
            .collect()
    }

    pub fn free_count(&self) -> usize {
        self.kind.free_generators().len() + self.family.arity()
    }

    /// Positions of the free parameters in the full vector.
    pub fn free_indices(&self) -> Vec<usize> {
        self.kind
            .free_generators()
            .iter()
            .copied()
            .chain((0..self.family.arity()).map(|i| 4 + i))
            .collect()
    }

    pub fn free_values(&self, model: &BKw<T>) -> Vec<T> {
        let full = full_params(model);
        self.free_indices().into_iter().map(|i| full[i]).collect()
    }

    /// Model from free values, fixed shapes at 1.
    pub fn build(&self, free: &[T]) -> Result<BKw<T>> {
        if free.len() != self.free_count() {
            return domain(format!(
                "{} has {} free parameters, got {}",
                self.label(),
                self.free_count(),
                free.len()
            ));
        }
        let mut g = [T::one(); 4];
        let gens = self.kind.free_generators();
        for (k, &i) in gens.iter().enumerate() {
            g[i] = free[k];
        }
        let base = Baseline::new(self.family.clone(), free[gens.len()..].to_vec())?;
        BKw::new(g[0], g[1], g[2], g[3], base)
    }
}

/// `(m, n, a, b, baseline...)`.
pub fn full_params<T: Real>(model: &BKw<T>) -> Vec<T> {
    let mut v = vec![model.m(), model.n(), model.a(), model.b()];
    v.extend_from_slice(model.baseline().params());
    v
}

/// Observations for fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub values: Vec<T>,
    pub label: String,
}

impl<T: Real> Dataset<T> {
    pub fn new(values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("dataset is empty".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!("value {i} is not finite: {v}")));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    /// One of the bundled datasets (`nicotine`, `chemo`).
    pub fn bundled(id: &str) -> Result<Self> {
        match crate::datasets::bundled(id) {
            Some(v) => Self::new(v.iter().map(|&x| T::lit(x)).collect(), id),
            None => Err(Error::InvalidData(format!("no bundled dataset `{id}`"))),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Errors if a value is not above the baseline's lower support end.
    pub fn check_support(&self, baseline: &Baseline<T>) -> Result<()> {
        let low = baseline.support_low();
        match self.values.iter().position(|&v| !(v > low)) {
            Some(i) => Err(Error::InvalidData(format!(
                "value {} = {} is not above the support bound {low}",
                i, self.values[i]
            ))),
            None => Ok(()),
        }
    }
}

/// `Σ ln f(t_i)`, `-inf` when any observation has zero density.
pub fn log_likelihood<T: Real>(model: &BKw<T>, data: &Dataset<T>) -> T {
    let mut s = T::zero();
    for &t in &data.values {
        let l = model.log_pdf(t);
        if !(l > T::neg_infinity()) {
            return T::neg_infinity();
        }
        s += l;
    }
    s
}

/// Per-observation derivatives shared by the score and the moment gradient.
struct ObsPartials<T> {
    /// `d ln f / dθ` without the `-ln B + ln a + ln b` constants.
    log_pdf: Vec<T>,
    /// `d ln W / dθ`.
    log_w: Vec<T>,
    log_w_value: T,
}

fn obs_partials<T: Real>(model: &BKw<T>, t: T) -> ObsPartials<T> {
    let (m, n, a, b) = (model.m(), model.n(), model.a(), model.b());
    let one = T::one();
    let tm = model.terms(t);
    let gr = model.baseline().gradient(t);
    let k = gr.d_log_pdf.len();
    let la = a * tm.log_cdf;
    // d ln X / da, written so it stays finite as G -> 1
    let xa = la.exp() / (a * exprel(la));
    let v = tm.log_xb;
    // -d ln W / d ln X^b
    let sigma = v.exp() / -v.exp_m1();
    let (wm, xc) = (m - one, b * n - one);
    let wpart = |d: T| if wm == T::zero() { T::zero() } else { wm * d };
    let mut lp = vec![T::zero(); 4 + k];
    let mut lw = vec![T::zero(); 4 + k];
    lp[0] = tm.log_w;
    lp[1] = b * tm.log_x;
    lw[2] = -sigma * b * xa;
    lp[2] = tm.log_cdf + xc * xa + wpart(lw[2]);
    lw[3] = -sigma * tm.log_x;
    lp[3] = n * tm.log_x + wpart(lw[3]);
    let small_g = tm.log_cdf < -T::LN_2();
    for i in 0..k {
        let dlx = if small_g {
            // A / X = e^{lA} / (1 - e^{lA})
            -a * (la.exp() / -la.exp_m1()) * gr.d_log_cdf[i]
        } else {
            a * (la + tm.log_sf - tm.log_cdf - tm.log_x).exp() * gr.d_log_sf[i]
        };
        lw[4 + i] = -sigma * b * dlx;
        lp[4 + i] = gr.d_log_pdf[i] + (a - one) * gr.d_log_cdf[i] + xc * dlx + wpart(lw[4 + i]);
    }
    ObsPartials {
        log_pdf: lp,
        log_w: lw,
        log_w_value: tm.log_w,
    }
}

/// Gradient of the log-likelihood in all of `(m, n, a, b, baseline...)`.
pub fn score_full<T: Real>(model: &BKw<T>, data: &Dataset<T>) -> Vec<T> {
    let (m, n, a, b) = (model.m(), model.n(), model.a(), model.b());
    let r = T::of(data.len());
    let k = model.baseline().params().len();
    let mut u = vec![T::zero(); 4 + k];
    u[0] = r * (psi(m + n) - psi(m));
    u[1] = r * (psi(m + n) - psi(n));
    u[2] = r / a;
    u[3] = r / b;
    for &t in &data.values {
        let p = obs_partials(model, t);
        for (acc, v) in u.iter_mut().zip(&p.log_pdf) {
            *acc += *v;
        }
    }
    u
}

/// Score in the free parameters of `spec`.
pub fn score<T: Real>(spec: &ModelSpec<T>, model: &BKw<T>, data: &Dataset<T>) -> Vec<T> {
    let full = score_full(model, data);
    spec.free_indices().into_iter().map(|i| full[i]).collect()
}

/// How [`observed_info_with`] forms the Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoMode {
    /// Central differences of the analytic score.
    FiniteDifference,
    /// Closed-form second derivatives; exponential baseline only.
    Analytic,
}

/// Observed information `-∂²ℓ` in the free parameters, by central
/// differences of the score with relative steps `ε^{1/3} |θ_i|`.
pub fn observed_info<T: Real>(spec: &ModelSpec<T>, model: &BKw<T>, data: &Dataset<T>) -> Result<Matrix<T>> {
    observed_info_with(spec, model, data, InfoMode::FiniteDifference)
}

pub fn observed_info_with<T: Real>(
    spec: &ModelSpec<T>,
    model: &BKw<T>,
    data: &Dataset<T>,
    mode: InfoMode,
) -> Result<Matrix<T>> {
    match mode {
        InfoMode::Analytic => {
            let full = exponential_info(model, data)?;
            Ok(full.select(&spec.free_indices()))
        }
        InfoMode::FiniteDifference => {
            let x = spec.free_values(model);
            let k = x.len();
            let mut h = Matrix::zeros(k);
            let cb = T::epsilon().cbrt();
            for i in 0..k {
                let step = cb * x[i].abs().max(T::lit(1e-12));
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += step;
                xm[i] -= step;
                let up = score(spec, &spec.build(&xp)?, data);
                let um = score(spec, &spec.build(&xm)?, data);
                for j in 0..k {
                    h.set(j, i, -(up[j] - um[j]) / (step + step));
                }
            }
            Ok(h.symmetrized())
        }
    }
}

/// Closed-form observed information of BKw-E in `(m, n, a, b, λ)`.
fn exponential_info<T: Real>(model: &BKw<T>, data: &Dataset<T>) -> Result<Matrix<T>> {
    if !matches!(model.baseline().family(), Family::Exponential) {
        return domain("analytic information is only available for the exponential baseline");
    }
    let (m, n, a, b) = (model.m(), model.n(), model.a(), model.b());
    let lam = model.baseline().params()[0];
    let one = T::one();
    let r = T::of(data.len());
    let mut h = [[T::zero(); 5]; 5];
    let p1 = psi1(m + n);
    h[0][0] = r * (p1 - psi1(m));
    h[0][1] = r * p1;
    h[1][1] = r * (p1 - psi1(n));
    h[2][2] = -r / (a * a);
    h[3][3] = -r / (b * b);
    h[4][4] = -r / (lam * lam);
    let (wm, xc) = (m - one, b * n - one);
    for &t in &data.values {
        let tm = model.terms(t);
        let lg = tm.log_cdf;
        // d ln G / dλ and its derivative
        let rho = (lam * t).exp_m1().recip();
        let dg = t * rho;
        let ddg = -t * t * rho * (one + rho);
        let la = a * lg;
        let q = la.exp() / -la.exp_m1();
        let q2 = q * (one + q);
        let lx = tm.log_x;
        let xa = -q * lg;
        let xl = -q * a * dg;
        let xaa = -q2 * lg * lg;
        let xal = -q * dg * (one + a * (one + q) * lg);
        let xll = -a * (q2 * a * dg * dg + q * ddg);
        let v = tm.log_xb;
        let s = v.exp() / -v.exp_m1();
        let s2 = s * (one + s);
        let (va, vb, vl) = (b * xa, lx, b * xl);
        h[0][2] += -s * va;
        h[0][3] += -s * vb;
        h[0][4] += -s * vl;
        h[1][2] += b * xa;
        h[1][3] += lx;
        h[1][4] += b * xl;
        h[2][2] += xc * xaa + wm * (-s2 * va * va - s * b * xaa);
        h[2][3] += n * xa + wm * (-s2 * va * vb - s * xa);
        h[2][4] += dg + xc * xal + wm * (-s2 * va * vl - s * b * xal);
        h[3][3] += wm * (-s2 * vb * vb);
        h[3][4] += n * xl + wm * (-s2 * vb * vl - s * xl);
        h[4][4] += (a - one) * ddg + xc * xll + wm * (-s2 * vl * vl - s * b * xll);
    }
    Ok(Matrix::from_fn(5, |i, j| if i <= j { -h[i][j] } else { -h[j][i] }))
}

/// `2k - 2ℓ`.
pub fn aic<T: Real>(k: usize, loglik: T) -> T {
    T::of(2 * k) - T::lit(2.0) * loglik
}

/// `θ_j ± z se_j` on the natural scale, `z` the two-sided normal quantile.
pub fn wald_ci<T: Real>(estimates: &[T], std_errors: &[T], level: T) -> Result<(Vec<T>, Vec<T>)> {
    if !(level > T::zero() && level < T::one()) {
        return domain(format!("confidence level must lie in (0, 1), got {level}"));
    }
    let z = normal_quantile(T::lit(0.5) + T::lit(0.5) * level);
    let lo = estimates.iter().zip(std_errors).map(|(e, s)| *e - z * *s).collect();
    let hi = estimates.iter().zip(std_errors).map(|(e, s)| *e + z * *s).collect();
    Ok((lo, hi))
}

/// Settings for [`fit_mle`].
#[derive(Debug, Clone)]
pub struct FitOptions<T> {
    /// Number of starting points, nested-model starts included.
    pub restarts: usize,
    pub seed: u64,
    /// Optional starting point in the free parameters.
    pub init: Option<Vec<T>>,
    /// Bound on `‖score‖∞`; `None` means `1e-4` per observation.
    pub stationarity_tol: Option<T>,
    pub level: T,
    pub max_iter: usize,
}

impl<T: Real> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            init: None,
            stationarity_tol: None,
            level: T::lit(0.95),
            max_iter: 500,
        }
    }
}

/// Outcome of a likelihood fit.
#[derive(Debug, Clone)]
pub struct FitResult<T: Real> {
    pub spec: ModelSpec<T>,
    pub model: BKw<T>,
    pub names: Vec<String>,
    pub estimates: Vec<T>,
    /// `None` when the information matrix could not be inverted.
    pub std_errors: Option<Vec<T>>,
    pub ci_low: Option<Vec<T>>,
    pub ci_high: Option<Vec<T>>,
    pub level: T,
    pub loglik: T,
    pub aic: T,
    pub converged: bool,
    pub restarts_used: usize,
    /// `‖score‖∞` at the estimate, natural scale.
    pub grad_norm: T,
    pub info: Option<Matrix<T>>,
    pub n_obs: usize,
}

impl<T: Real> FitResult<T> {
    pub fn label(&self) -> String {
        self.spec.label()
    }
}

// log-parameter box: every free parameter stays in [1e-6, 1e6]
fn log_box<T: Real>() -> (T, T) {
    let l = T::lit(1e6).ln();
    (-l, l)
}

struct Objective<'a, T: Real> {
    spec: &'a ModelSpec<T>,
    data: &'a Dataset<T>,
}

impl<T: Real> Objective<'_, T> {
    /// `-ℓ / r` and its gradient in log-parameters.
    fn eval(&self, x: &[T]) -> (T, Vec<T>) {
        let r = T::of(self.data.len());
        let theta: Vec<T> = x.iter().map(|v| v.exp()).collect();
        let model = match self.spec.build(&theta) {
            Ok(m) => m,
            Err(_) => return (T::infinity(), vec![T::zero(); x.len()]),
        };
        let ll = log_likelihood(&model, self.data);
        if !ll.is_finite() {
            return (T::infinity(), vec![T::zero(); x.len()]);
        }
        let u = score(self.spec, &model, self.data);
        let g = u.iter().zip(&theta).map(|(ui, ti)| -*ui * *ti / r).collect();
        (-ll / r, g)
    }

    fn value(&self, x: &[T]) -> T {
        let theta: Vec<T> = x.iter().map(|v| v.exp()).collect();
        match self.spec.build(&theta) {
            Ok(m) => {
                let ll = log_likelihood(&m, self.data);
                if ll.is_finite() {
                    -ll / T::of(self.data.len())
                } else {
                    T::infinity()
                }
            }
            Err(_) => T::infinity(),
        }
    }
}

fn local_fit<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, start: &[T], max_iter: usize) -> Option<Minimum<T>> {
    let obj = Objective { spec, data };
    let (lo, hi) = log_box::<T>();
    let x0: Vec<T> = start.iter().map(|v| v.ln().max(lo).min(hi)).collect();
    let gtol = T::lit(1e-10);
    let fg = |x: &[T]| obj.eval(x);
    let found = match bfgs(fg, &x0, lo, hi, max_iter, gtol) {
        Some(m) if m.f.is_finite() => Some(m),
        _ => {
            let (x, _) = nelder_mead(|x: &[T]| obj.value(x), &x0, T::lit(0.3), lo, hi, 40 * max_iter, T::lit(1e-14))?;
            let (f, g) = obj.eval(&x);
            let m = Minimum { x, f, g, iterations: 0 };
            bfgs(fg, &m.x, lo, hi, max_iter, gtol).or(Some(m))
        }
    }?;
    Some(newton_polish(fg, found, lo, hi, 30, T::lit(1e-12)))
}

/// Starting baselines from a log-uniform scan of the parameter box, ranked
/// by likelihood on (a thinned copy of) the data.
fn baseline_scan<T: Real>(family: &Family<T>, data: &Dataset<T>, seed: u64, keep: usize) -> Vec<Vec<T>> {
    let spec = ModelSpec::new(ModelKind::BaselineOnly, family.clone());
    let stride = (data.len() / 2000).max(1);
    let thin = Dataset {
        values: data.values.iter().step_by(stride).copied().collect(),
        label: data.label.clone(),
    };
    let obj = Objective { spec: &spec, data: &thin };
    let k = family.arity();
    let mut rng = UniformStream::new(seed, u64::MAX);
    let mut cands: Vec<(T, Vec<T>)> = Vec::new();
    let mut push = |x: Vec<T>| {
        let f = obj.value(&x);
        if f.is_finite() {
            cands.push((f, x));
        }
    };
    push(vec![T::zero(); k]);
    for _ in 0..(96 * k) {
        push((0..k).map(|_| T::lit(-5.0) + T::lit(10.0) * rng.next_uniform::<T>()).collect());
    }
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    cands
        .into_iter()
        .take(keep)
        .map(|(_, x)| x.into_iter().map(|v| v.exp()).collect())
        .collect()
}

/// Baseline-only maximum likelihood parameters.
fn baseline_mle<T: Real>(family: &Family<T>, data: &Dataset<T>, opts: &FitOptions<T>) -> Result<Vec<T>> {
    let spec = ModelSpec::new(ModelKind::BaselineOnly, family.clone());
    let starts = baseline_scan(family, data, opts.seed, 4);
    let best = starts
        .par_iter()
        .map(|s| local_fit(&spec, data, s, opts.max_iter))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None::<Minimum<T>>, |acc, m| match acc {
            Some(a) if a.f <= m.f => Some(a),
            _ => Some(m),
        });
    match best {
        Some(m) => Ok(m.x.into_iter().map(|v| v.exp()).collect()),
        None => Err(Error::Convergence {
            routine: "baseline fit",
            iterations: opts.max_iter,
        }),
    }
}

fn best_of<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, starts: &[Vec<T>], max_iter: usize) -> Option<Minimum<T>> {
    let found: Vec<Option<Minimum<T>>> = starts
        .par_iter()
        .map(|s| local_fit(spec, data, s, max_iter))
        .collect();
    // lowest objective, ties to the earliest start
    let mut best: Option<Minimum<T>> = None;
    for m in found.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| m.f < b.f) {
            best = Some(m);
        }
    }
    best
}

fn lift<T: Real>(spec: &ModelSpec<T>, sub: &ModelSpec<T>, x: &[T]) -> Option<Vec<T>> {
    let theta: Vec<T> = x.iter().map(|v| v.exp()).collect();
    sub.build(&theta).ok().map(|m| spec.free_values(&m))
}

fn search<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, opts: &FitOptions<T>, base: &[T]) -> (Option<Minimum<T>>, usize) {
    let gens = spec.kind.free_generators();
    let mut starts: Vec<Vec<T>> = Vec::new();
    if let Some(init) = &opts.init {
        if init.len() == spec.free_count() {
            starts.push(init.clone());
        }
    }
    let mut nested = vec![T::one(); gens.len()];
    nested.extend_from_slice(base);
    starts.push(nested);
    if spec.kind == ModelKind::BKw {
        for kind in [ModelKind::Kw, ModelKind::Beta] {
            let sub = ModelSpec::new(kind, spec.family.clone());
            let sub_opts = FitOptions {
                restarts: (opts.restarts / 2).max(2),
                init: None,
                ..opts.clone()
            };
            if let (Some(m), _) = search(&sub, data, &sub_opts, base) {
                if let Some(v) = lift(spec, &sub, &m.x) {
                    starts.push(v);
                }
            }
        }
    }
    let mut rng = UniformStream::new(opts.seed, spec.kind as u64 + 1);
    while starts.len() < opts.restarts.max(1) {
        let mut s: Vec<T> = (0..gens.len())
            .map(|_| (T::lit(0.7) * rng.next_normal::<T>()).exp())
            .collect();
        s.extend(base.iter().map(|&p| p * (T::lit(0.3) * rng.next_normal::<T>()).exp()));
        starts.push(s);
    }
    (best_of(spec, data, &starts, opts.max_iter), starts.len())
}

/// Maximum likelihood fit with multiple starts.
///
/// Starts are the baseline's own fit embedded with unit shapes, the optima
/// of the nested sub-models (for the full model), an optional user start,
/// and seeded log-normal jitter around those. Restarts run in parallel and
/// the best one wins, ties going to the earliest start.
pub fn fit_mle<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, opts: &FitOptions<T>) -> Result<FitResult<T>> {
    if data.values.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::InvalidData("all observations must be positive".into()));
    }
    let base = baseline_mle(&spec.family, data, opts)?;
    let (best, used) = search(spec, data, opts, &base);
    let best = best.ok_or(Error::Convergence {
        routine: "maximum likelihood",
        iterations: opts.max_iter,
    })?;
    let estimates: Vec<T> = best.x.iter().map(|v| v.exp()).collect();
    let model = spec.build(&estimates)?;
    finish(spec, data, model, used, opts)
}

/// Fills in the likelihood, score norm, information and intervals at `model`.
pub fn summarize<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, model: BKw<T>, opts: &FitOptions<T>) -> Result<FitResult<T>> {
    finish(spec, data, model, 0, opts)
}

fn finish<T: Real>(
    spec: &ModelSpec<T>,
    data: &Dataset<T>,
    model: BKw<T>,
    used: usize,
    opts: &FitOptions<T>,
) -> Result<FitResult<T>> {
    let r = T::of(data.len());
    let estimates = spec.free_values(&model);
    let loglik = log_likelihood(&model, data);
    let u = score(spec, &model, data);
    let grad_norm = u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = opts.stationarity_tol.unwrap_or(T::lit(1e-4) * r);
    let info = observed_info(spec, &model, data).ok();
    let std_errors = info.as_ref().and_then(|i| i.inverse().ok()).and_then(|cov| {
        let d = cov.diagonal();
        if d.iter().all(|v| *v >= T::zero() && v.is_finite()) {
            Some(d.into_iter().map(|v| v.sqrt()).collect::<Vec<T>>())
        } else {
            None
        }
    });
    let (ci_low, ci_high) = match &std_errors {
        Some(se) => {
            let (lo, hi) = wald_ci(&estimates, se, opts.level)?;
            (Some(lo), Some(hi))
        }
        None => (None, None),
    };
    let k = spec.free_count();
    Ok(FitResult {
        spec: spec.clone(),
        names: spec.free_names(),
        estimates,
        std_errors,
        ci_low,
        ci_high,
        level: opts.level,
        loglik,
        aic: aic(k, loglik),
        converged: loglik.is_finite() && grad_norm <= tol,
        restarts_used: used,
        grad_norm,
        info,
        n_obs: data.len(),
        model,
    })
}

/// `mean(W_i^v) - B(m + v, n) / B(m, n)` with `W = 1 - (1 - G^a)^b`.
pub fn mom_residual<T: Real>(model: &BKw<T>, data: &Dataset<T>, v: usize) -> T {
    let vv = T::of(v);
    let mean = data
        .values
        .iter()
        .map(|&t| (vv * model.terms(t).log_w).exp())
        .fold(T::zero(), |a, b| a + b)
        / T::of(data.len());
    mean - (lbeta(model.m() + vv, model.n()) - lbeta(model.m(), model.n())).exp()
}

/// Result of a moment fit.
#[derive(Debug, Clone)]
pub struct MomFit<T: Real> {
    pub spec: ModelSpec<T>,
    pub model: BKw<T>,
    pub estimates: Vec<T>,
    /// Residuals for `v = 1..=V`.
    pub residuals: Vec<T>,
    pub objective: T,
    pub converged: bool,
}

/// `Σ_v residual_v²` and its gradient in log-parameters.
fn mom_objective<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, moments: usize, x: &[T]) -> (T, Vec<T>) {
    let theta: Vec<T> = x.iter().map(|v| v.exp()).collect();
    let model = match spec.build(&theta) {
        Ok(m) => m,
        Err(_) => return (T::infinity(), vec![T::zero(); x.len()]),
    };
    let (m, n) = (model.m(), model.n());
    let nfull = 4 + model.baseline().params().len();
    let r = T::of(data.len());
    // per v: mean of W^v and of v W^v d ln W
    let mut mean = vec![T::zero(); moments];
    let mut dmean = vec![vec![T::zero(); nfull]; moments];
    for &t in &data.values {
        let p = obs_partials(&model, t);
        for v in 0..moments {
            let vv = T::of(v + 1);
            let wv = (vv * p.log_w_value).exp();
            mean[v] += wv / r;
            for (d, lw) in dmean[v].iter_mut().zip(&p.log_w) {
                *d += vv * wv * *lw / r;
            }
        }
    }
    let mut f = T::zero();
    let mut gfull = vec![T::zero(); nfull];
    for v in 0..moments {
        let vv = T::of(v + 1);
        let target = (lbeta(m + vv, n) - lbeta(m, n)).exp();
        let res = mean[v] - target;
        f += res * res;
        let mut d = dmean[v].clone();
        d[0] -= target * (psi(m + vv) - psi(m + vv + n) - psi(m) + psi(m + n));
        d[1] -= target * (psi(m + n) - psi(m + vv + n));
        for (g, di) in gfull.iter_mut().zip(&d) {
            *g += T::lit(2.0) * res * *di;
        }
    }
    if !f.is_finite() {
        return (T::infinity(), vec![T::zero(); x.len()]);
    }
    let idx = spec.free_indices();
    let g = idx.iter().zip(&theta).map(|(&i, t)| gfull[i] * *t).collect();
    (f, g)
}

/// Moment estimator: minimizes `Σ_{v=1..V} residual_v²` over the free
/// parameters. Needs `V` at least the number of free parameters.
pub fn fit_mom<T: Real>(spec: &ModelSpec<T>, data: &Dataset<T>, moments: usize, opts: &FitOptions<T>) -> Result<MomFit<T>> {
    let k = spec.free_count();
    if moments < k {
        return domain(format!("{moments} moment equations cannot identify {k} parameters"));
    }
    let base = baseline_mle(&spec.family, data, opts)?;
    let gens = spec.kind.free_generators().len();
    let mut starts: Vec<Vec<T>> = Vec::new();
    if let Some(init) = &opts.init {
        starts.push(init.clone());
    }
    let mut nested = vec![T::one(); gens];
    nested.extend_from_slice(&base);
    starts.push(nested);
    let mut rng = UniformStream::new(opts.seed, 1 << 20);
    while starts.len() < opts.restarts.clamp(1, 8) {
        let mut s: Vec<T> = (0..gens).map(|_| (T::lit(0.7) * rng.next_normal::<T>()).exp()).collect();
        s.extend(base.iter().map(|&p| p * (T::lit(0.3) * rng.next_normal::<T>()).exp()));
        starts.push(s);
    }
    let (lo, hi) = log_box::<T>();
    let found: Vec<Option<Minimum<T>>> = starts
        .par_iter()
        .map(|s| {
            let x0: Vec<T> = s.iter().map(|v| v.ln().max(lo).min(hi)).collect();
            let fg = |x: &[T]| mom_objective(spec, data, moments, x);
            bfgs(fg, &x0, lo, hi, opts.max_iter, T::lit(1e-14))
        })
        .collect();
    let mut best: Option<Minimum<T>> = None;
    for m in found.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| m.f < b.f) {
            best = Some(m);
        }
    }
    let best = best.ok_or(Error::Convergence {
        routine: "moment fit",
        iterations: opts.max_iter,
    })?;
    let estimates: Vec<T> = best.x.iter().map(|v| v.exp()).collect();
    let model = spec.build(&estimates)?;
    let residuals: Vec<T> = (1..=moments).map(|v| mom_residual(&model, data, v)).collect();
    let pg = projected(&best.x, &best.g, lo, hi);
    let converged = best.f <= T::lit(1e-12) || pg.iter().all(|g| g.abs() <= T::lit(1e-10));
    Ok(MomFit {
        spec: spec.clone(),
        model,
        estimates,
        residuals,
        objective: best.f,
        converged,
    })
}
