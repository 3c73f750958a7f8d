//! Baseline distributions `G` that the generator is applied to.
//!
//! Every family exposes log-cdf, log-sf and log-pdf evaluated together, the
//! quantile, the slope of the log-density and the parameter gradients of
//! `ln G`, `ln(1 - G)` and `ln g`. Parameters follow the conventional order
//! for each family, e.g. Dagum `(tau1, tau2, tau3)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::real::{log1mexp, mul_log, Real};

/// Tag naming a baseline family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    Exponential,
    Weibull,
    Lomax,
    Frechet,
    Gompertz,
    Dagum,
    SinghMaddala,
    ExpPareto,
    ModifiedWeibull,
    ExtendedWeibull,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::Exponential,
        FamilyId::Weibull,
        FamilyId::Lomax,
        FamilyId::Frechet,
        FamilyId::Gompertz,
        FamilyId::Dagum,
        FamilyId::SinghMaddala,
        FamilyId::ExpPareto,
        FamilyId::ModifiedWeibull,
        FamilyId::ExtendedWeibull,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Exponential => "exponential",
            FamilyId::Weibull => "weibull",
            FamilyId::Lomax => "lomax",
            FamilyId::Frechet => "frechet",
            FamilyId::Gompertz => "gompertz",
            FamilyId::Dagum => "dagum",
            FamilyId::SinghMaddala => "singh_maddala",
            FamilyId::ExpPareto => "exp_pareto",
            FamilyId::ModifiedWeibull => "modified_weibull",
            FamilyId::ExtendedWeibull => "extended_weibull",
        }
    }

    /// One-letter suffix used in model labels such as `BKw-W`.
    pub fn short(self) -> &'static str {
        match self {
            FamilyId::Exponential => "E",
            FamilyId::Weibull => "W",
            FamilyId::Lomax => "L",
            FamilyId::Frechet => "Fr",
            FamilyId::Gompertz => "Go",
            FamilyId::Dagum => "D",
            FamilyId::SinghMaddala => "SM",
            FamilyId::ExpPareto => "EP",
            FamilyId::ModifiedWeibull => "MW",
            FamilyId::ExtendedWeibull => "EW",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == key)
            .ok_or_else(|| Error::Domain(format!("unknown baseline family `{s}`")))
    }
}

/// Monotone cumulative shape `Z(t; theta)` of the extended Weibull class,
/// `G(t) = 1 - exp(-delta Z(t; theta))`.
pub trait HazardShape<T: Real>: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Labels of the shape parameters `theta`.
    fn param_names(&self) -> Vec<String> {
        Vec::new()
    }

    fn validate(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.param_names().len() {
            return domain(format!(
                "shape `{}` expects {} parameters, got {}",
                self.name(),
                self.param_names().len(),
                theta.len()
            ));
        }
        positive_all(theta)
    }

    fn support_low(&self, _theta: &[T]) -> T {
        T::zero()
    }

    /// `Z(t)`.
    fn cumulative(&self, t: T, theta: &[T]) -> T;

    /// `z(t) = dZ/dt`.
    fn rate(&self, t: T, theta: &[T]) -> T;

    /// `dz/dt`; defaults to a central difference of [`HazardShape::rate`].
    fn rate_slope(&self, t: T, theta: &[T]) -> T {
        let h = T::epsilon().cbrt() * t.abs().max(T::one());
        let lo = (t - h).max(self.support_low(theta));
        (self.rate(t + h, theta) - self.rate(lo, theta)) / (t + h - lo)
    }

    /// Closed-form `Z^{-1}(y)` when one exists.
    fn inverse(&self, _y: T, _theta: &[T]) -> Option<T> {
        None
    }

    /// `(dZ/dtheta, dz/dtheta)`; defaults to central differences.
    fn gradient(&self, t: T, theta: &[T]) -> (Vec<T>, Vec<T>) {
        let mut dz_cum = Vec::with_capacity(theta.len());
        let mut dz_rate = Vec::with_capacity(theta.len());
        let mut work = theta.to_vec();
        for i in 0..theta.len() {
            let h = T::epsilon().cbrt() * theta[i].abs().max(T::lit(1e-3));
            work[i] = theta[i] + h;
            let (zp, rp) = (self.cumulative(t, &work), self.rate(t, &work));
            work[i] = theta[i] - h;
            let (zm, rm) = (self.cumulative(t, &work), self.rate(t, &work));
            work[i] = theta[i];
            let two_h = h + h;
            dz_cum.push((zp - zm) / two_h);
            dz_rate.push((rp - rm) / two_h);
        }
        (dz_cum, dz_rate)
    }
}

/// `Z(t) = t`: exponential baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearShape;

impl<T: Real> HazardShape<T> for LinearShape {
    fn name(&self) -> &str {
        "linear"
    }
    fn cumulative(&self, t: T, _: &[T]) -> T {
        t
    }
    fn rate(&self, _: T, _: &[T]) -> T {
        T::one()
    }
    fn rate_slope(&self, _: T, _: &[T]) -> T {
        T::zero()
    }
    fn inverse(&self, y: T, _: &[T]) -> Option<T> {
        Some(y)
    }
    fn gradient(&self, _: T, _: &[T]) -> (Vec<T>, Vec<T>) {
        (Vec::new(), Vec::new())
    }
}

/// `Z(t) = t^2`: Rayleigh baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareShape;

impl<T: Real> HazardShape<T> for SquareShape {
    fn name(&self) -> &str {
        "square"
    }
    fn cumulative(&self, t: T, _: &[T]) -> T {
        t * t
    }
    fn rate(&self, t: T, _: &[T]) -> T {
        t + t
    }
    fn rate_slope(&self, _: T, _: &[T]) -> T {
        T::lit(2.0)
    }
    fn inverse(&self, y: T, _: &[T]) -> Option<T> {
        Some(y.sqrt())
    }
    fn gradient(&self, _: T, _: &[T]) -> (Vec<T>, Vec<T>) {
        (Vec::new(), Vec::new())
    }
}

/// `Z(t) = ln(t / k)` on `t > k`: Pareto baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogRatioShape;

impl<T: Real> HazardShape<T> for LogRatioShape {
    fn name(&self) -> &str {
        "log_ratio"
    }
    fn param_names(&self) -> Vec<String> {
        vec!["k".into()]
    }
    fn support_low(&self, theta: &[T]) -> T {
        theta[0]
    }
    fn cumulative(&self, t: T, theta: &[T]) -> T {
        (t / theta[0]).ln()
    }
    fn rate(&self, t: T, _: &[T]) -> T {
        t.recip()
    }
    fn rate_slope(&self, t: T, _: &[T]) -> T {
        -(t * t).recip()
    }
    fn inverse(&self, y: T, theta: &[T]) -> Option<T> {
        Some(theta[0] * y.exp())
    }
    fn gradient(&self, _: T, theta: &[T]) -> (Vec<T>, Vec<T>) {
        (vec![-theta[0].recip()], vec![T::zero()])
    }
}

/// `Z(t) = (e^{beta t} - 1) / beta`: Gompertz baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct GompertzShape;

impl<T: Real> HazardShape<T> for GompertzShape {
    fn name(&self) -> &str {
        "gompertz"
    }
    fn param_names(&self) -> Vec<String> {
        vec!["beta".into()]
    }
    fn cumulative(&self, t: T, theta: &[T]) -> T {
        (theta[0] * t).exp_m1() / theta[0]
    }
    fn rate(&self, t: T, theta: &[T]) -> T {
        (theta[0] * t).exp()
    }
    fn rate_slope(&self, t: T, theta: &[T]) -> T {
        theta[0] * (theta[0] * t).exp()
    }
    fn inverse(&self, y: T, theta: &[T]) -> Option<T> {
        Some((theta[0] * y).ln_1p() / theta[0])
    }
    fn gradient(&self, t: T, theta: &[T]) -> (Vec<T>, Vec<T>) {
        let b = theta[0];
        let e = (b * t).exp();
        (vec![t * e / b - (b * t).exp_m1() / (b * b)], vec![t * e])
    }
}

/// Looks up a built-in shape by name.
pub fn shape_by_name<T: Real>(name: &str) -> Result<Arc<dyn HazardShape<T>>> {
    match name.trim().to_ascii_lowercase().as_str() {
        "linear" => Ok(Arc::new(LinearShape)),
        "square" | "rayleigh" => Ok(Arc::new(SquareShape)),
        "log_ratio" | "pareto" => Ok(Arc::new(LogRatioShape)),
        "gompertz" => Ok(Arc::new(GompertzShape)),
        other => domain(format!("unknown hazard shape `{other}`")),
    }
}

/// A baseline family. Extended Weibull carries its `Z` shape.
#[derive(Debug, Clone)]
pub enum Family<T: Real> {
    Exponential,
    Weibull,
    Lomax,
    Frechet,
    Gompertz,
    Dagum,
    SinghMaddala,
    ExpPareto,
    ModifiedWeibull,
    ExtendedWeibull(Arc<dyn HazardShape<T>>),
}

impl<T: Real> Family<T> {
    /// Family for a tag; extended Weibull defaults to the linear shape.
    pub fn from_id(id: FamilyId) -> Self {
        match id {
            FamilyId::Exponential => Family::Exponential,
            FamilyId::Weibull => Family::Weibull,
            FamilyId::Lomax => Family::Lomax,
            FamilyId::Frechet => Family::Frechet,
            FamilyId::Gompertz => Family::Gompertz,
            FamilyId::Dagum => Family::Dagum,
            FamilyId::SinghMaddala => Family::SinghMaddala,
            FamilyId::ExpPareto => Family::ExpPareto,
            FamilyId::ModifiedWeibull => Family::ModifiedWeibull,
            FamilyId::ExtendedWeibull => Family::ExtendedWeibull(Arc::new(LinearShape)),
        }
    }

    pub fn extended(shape: Arc<dyn HazardShape<T>>) -> Self {
        Family::ExtendedWeibull(shape)
    }

    pub fn id(&self) -> FamilyId {
        match self {
            Family::Exponential => FamilyId::Exponential,
            Family::Weibull => FamilyId::Weibull,
            Family::Lomax => FamilyId::Lomax,
            Family::Frechet => FamilyId::Frechet,
            Family::Gompertz => FamilyId::Gompertz,
            Family::Dagum => FamilyId::Dagum,
            Family::SinghMaddala => FamilyId::SinghMaddala,
            Family::ExpPareto => FamilyId::ExpPareto,
            Family::ModifiedWeibull => FamilyId::ModifiedWeibull,
            Family::ExtendedWeibull(_) => FamilyId::ExtendedWeibull,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        let fixed: &[&str] = match self {
            Family::Exponential => &["lambda"],
            Family::Weibull => &["lambda", "beta"],
            Family::Lomax => &["beta", "delta"],
            Family::Frechet => &["lambda", "delta"],
            Family::Gompertz => &["lambda", "beta"],
            Family::Dagum => &["tau1", "tau2", "tau3"],
            Family::SinghMaddala => &["gamma1", "gamma2", "gamma3"],
            Family::ExpPareto => &["theta", "k", "gamma"],
            Family::ModifiedWeibull => &["sigma", "beta", "gamma"],
            Family::ExtendedWeibull(shape) => {
                let mut v = vec!["delta".to_string()];
                v.extend(shape.param_names());
                return v;
            }
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    pub fn arity(&self) -> usize {
        self.param_names().len()
    }
}

fn positive_all<T: Real>(p: &[T]) -> Result<()> {
    for (i, &v) in p.iter().enumerate() {
        if !(v > T::zero() && v.is_finite()) {
            return domain(format!("parameter {i} must be positive and finite, got {v}"));
        }
    }
    Ok(())
}

/// Logs of `G`, `1 - G` and `g` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseEval<T> {
    pub log_cdf: T,
    pub log_sf: T,
    pub log_pdf: T,
}

impl<T: Real> BaseEval<T> {
    fn outside() -> Self {
        Self {
            log_cdf: T::neg_infinity(),
            log_sf: T::zero(),
            log_pdf: T::neg_infinity(),
        }
    }

    fn from_log_sf(log_sf: T, log_pdf: T) -> Self {
        Self {
            log_cdf: log1mexp(log_sf.min(T::zero())),
            log_sf,
            log_pdf,
        }
    }

    fn from_log_cdf(log_cdf: T, log_pdf: T) -> Self {
        Self {
            log_cdf,
            log_sf: log1mexp(log_cdf.min(T::zero())),
            log_pdf,
        }
    }
}

/// Parameter gradients of `ln G`, `ln(1 - G)` and `ln g` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseGrad<T> {
    pub d_log_cdf: Vec<T>,
    pub d_log_sf: Vec<T>,
    pub d_log_pdf: Vec<T>,
}

/// A validated baseline: family plus parameter vector.
#[derive(Debug, Clone)]
pub struct Baseline<T: Real> {
    family: Family<T>,
    params: Vec<T>,
}

impl<T: Real> Baseline<T> {
    pub fn new(family: Family<T>, params: Vec<T>) -> Result<Self> {
        validate(&family, &params)?;
        Ok(Self { family, params })
    }

    pub fn exponential(lambda: T) -> Result<Self> {
        Self::new(Family::Exponential, vec![lambda])
    }

    pub fn weibull(lambda: T, beta: T) -> Result<Self> {
        Self::new(Family::Weibull, vec![lambda, beta])
    }

    /// Same family with new parameters.
    pub fn with_params(&self, params: Vec<T>) -> Result<Self> {
        Self::new(self.family.clone(), params)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn id(&self) -> FamilyId {
        self.family.id()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn param_names(&self) -> Vec<String> {
        self.family.param_names()
    }

    /// Lower end of the support.
    pub fn support_low(&self) -> T {
        match &self.family {
            Family::ExpPareto => self.params[0],
            Family::ExtendedWeibull(s) => s.support_low(&self.params[1..]),
            _ => T::zero(),
        }
    }

    /// `ln G`, `ln(1 - G)` and `ln g` at `t`.
    pub fn eval(&self, t: T) -> BaseEval<T> {
        let low = self.support_low();
        if t.is_nan() {
            return BaseEval {
                log_cdf: T::nan(),
                log_sf: T::nan(),
                log_pdf: T::nan(),
            };
        }
        if t < low {
            return BaseEval::outside();
        }
        if t == T::infinity() {
            return BaseEval {
                log_cdf: T::zero(),
                log_sf: T::neg_infinity(),
                log_pdf: T::neg_infinity(),
            };
        }
        let p = &self.params;
        let one = T::one();
        match &self.family {
            Family::Exponential => {
                let h = p[0] * t;
                BaseEval::from_log_sf(-h, p[0].ln() - h)
            }
            Family::Weibull => {
                let (lam, beta) = (p[0], p[1]);
                let lt = t.ln();
                let h = lam * (beta * lt).exp();
                BaseEval::from_log_sf(-h, lam.ln() + beta.ln() + mul_log(beta - one, lt) - h)
            }
            Family::Lomax => {
                let (beta, delta) = (p[0], p[1]);
                let l1 = (t / delta).ln_1p();
                BaseEval::from_log_sf(-beta * l1, beta.ln() - delta.ln() - (beta + one) * l1)
            }
            Family::Frechet => {
                let (lam, delta) = (p[0], p[1]);
                if t <= T::zero() {
                    return BaseEval::outside();
                }
                let k = (lam * (delta / t).ln()).exp();
                BaseEval::from_log_cdf(
                    -k,
                    lam.ln() + lam * delta.ln() - (lam + one) * t.ln() - k,
                )
            }
            Family::Gompertz => {
                let (lam, beta) = (p[0], p[1]);
                let h = beta * (lam * t).exp_m1() / lam;
                BaseEval::from_log_sf(-h, beta.ln() + lam * t - h)
            }
            Family::Dagum => {
                let (t1, t2, t3) = (p[0], p[1], p[2]);
                if t <= T::zero() {
                    return BaseEval::outside();
                }
                let lt = t.ln();
                let ls = t2.ln() - t3 * lt;
                let l1 = softplus(ls);
                BaseEval::from_log_cdf(
                    -t1 * l1,
                    t1.ln() + t2.ln() + t3.ln() - (t3 + one) * lt - (t1 + one) * l1,
                )
            }
            Family::SinghMaddala => {
                let (g1, g2, g3) = (p[0], p[1], p[2]);
                let lt = t.ln();
                let ls = g2.ln() + g3 * lt;
                let l1 = softplus(ls);
                BaseEval::from_log_sf(
                    -g1 * l1,
                    g1.ln() + g2.ln() + g3.ln() + mul_log(g3 - one, lt) - (g1 + one) * l1,
                )
            }
            Family::ExpPareto => {
                let (theta, k, gamma) = (p[0], p[1], p[2]);
                if t <= theta {
                    return BaseEval::outside();
                }
                let lq = k * (theta / t).ln();
                let l1q = log1mexp(lq);
                BaseEval::from_log_cdf(
                    gamma * l1q,
                    gamma.ln() + k.ln() + k * theta.ln() - (k + one) * t.ln()
                        + mul_log(gamma - one, l1q),
                )
            }
            Family::ModifiedWeibull => {
                let (sigma, beta, gamma) = (p[0], p[1], p[2]);
                let lt = t.ln();
                let tg = (gamma * lt).exp();
                let h = sigma * t + beta * tg;
                let rate = sigma + beta * gamma * (mul_log(gamma - one, lt)).exp();
                BaseEval::from_log_sf(-h, rate.ln() - h)
            }
            Family::ExtendedWeibull(shape) => {
                let (delta, theta) = (p[0], &p[1..]);
                if t <= low && low > T::zero() {
                    return BaseEval::outside();
                }
                let h = delta * shape.cumulative(t, theta);
                BaseEval::from_log_sf(-h, delta.ln() + shape.rate(t, theta).ln() - h)
            }
        }
    }

    pub fn cdf(&self, t: T) -> T {
        self.eval(t).log_cdf.exp()
    }

    pub fn sf(&self, t: T) -> T {
        self.eval(t).log_sf.exp()
    }

    pub fn pdf(&self, t: T) -> T {
        self.eval(t).log_pdf.exp()
    }

    pub fn log_pdf(&self, t: T) -> T {
        self.eval(t).log_pdf
    }

    /// `d ln g / dt` at an interior point.
    pub fn dlog_pdf_dt(&self, t: T) -> T {
        let p = &self.params;
        let one = T::one();
        match &self.family {
            Family::Exponential => -p[0],
            Family::Weibull => {
                let (lam, beta) = (p[0], p[1]);
                (beta - one) / t - lam * beta * (beta * t.ln()).exp() / t
            }
            Family::Lomax => -(p[0] + one) / (p[1] + t),
            Family::Frechet => {
                let (lam, delta) = (p[0], p[1]);
                let k = (lam * (delta / t).ln()).exp();
                (-(lam + one) + lam * k) / t
            }
            Family::Gompertz => p[0] - p[1] * (p[0] * t).exp(),
            Family::Dagum => {
                let (t1, t2, t3) = (p[0], p[1], p[2]);
                let s = t2 * (-t3 * t.ln()).exp();
                (-(t3 + one) + (t1 + one) * t3 * s / (one + s)) / t
            }
            Family::SinghMaddala => {
                let (g1, g2, g3) = (p[0], p[1], p[2]);
                let s = g2 * (g3 * t.ln()).exp();
                ((g3 - one) - (g1 + one) * g3 * s / (one + s)) / t
            }
            Family::ExpPareto => {
                let (theta, k, gamma) = (p[0], p[1], p[2]);
                let q = (k * (theta / t).ln()).exp();
                (-(k + one) + (gamma - one) * k * q / (one - q)) / t
            }
            Family::ModifiedWeibull => {
                let (sigma, beta, gamma) = (p[0], p[1], p[2]);
                let tg1 = ((gamma - one) * t.ln()).exp();
                let rate = sigma + beta * gamma * tg1;
                beta * gamma * (gamma - one) * tg1 / t / rate - rate
            }
            Family::ExtendedWeibull(shape) => {
                let (delta, theta) = (p[0], &p[1..]);
                let z = shape.rate(t, theta);
                shape.rate_slope(t, theta) / z - delta * z
            }
        }
    }

    /// Parameter gradients at an interior point.
    pub fn gradient(&self, t: T) -> BaseGrad<T> {
        let ev = self.eval(t);
        let k = self.params.len();
        let mut g = BaseGrad {
            d_log_cdf: vec![T::zero(); k],
            d_log_sf: vec![T::zero(); k],
            d_log_pdf: vec![T::zero(); k],
        };
        let p = &self.params;
        let one = T::one();
        // sf-side families fill d_log_sf, cdf-side families fill d_log_cdf
        let mut sf_side = true;
        match &self.family {
            Family::Exponential => {
                g.d_log_sf[0] = -t;
                g.d_log_pdf[0] = p[0].recip() - t;
            }
            Family::Weibull => {
                let (lam, beta) = (p[0], p[1]);
                let lt = t.ln();
                let tb = (beta * lt).exp();
                g.d_log_sf = vec![-tb, -lam * tb * lt];
                g.d_log_pdf = vec![lam.recip() - tb, beta.recip() + lt - lam * tb * lt];
            }
            Family::Lomax => {
                let (beta, delta) = (p[0], p[1]);
                let l1 = (t / delta).ln_1p();
                let r = t / (delta * (delta + t));
                g.d_log_sf = vec![-l1, beta * r];
                g.d_log_pdf = vec![beta.recip() - l1, -delta.recip() + (beta + one) * r];
            }
            Family::Frechet => {
                sf_side = false;
                let (lam, delta) = (p[0], p[1]);
                let ld = (delta / t).ln();
                let k = (lam * ld).exp();
                g.d_log_cdf = vec![-k * ld, -lam * k / delta];
                g.d_log_pdf = vec![lam.recip() + ld - k * ld, lam / delta - lam * k / delta];
            }
            Family::Gompertz => {
                let (lam, beta) = (p[0], p[1]);
                let e = (lam * t).exp();
                let em1 = (lam * t).exp_m1();
                let dh_dlam = -beta * em1 / (lam * lam) + beta * t * e / lam;
                let dh_dbeta = em1 / lam;
                g.d_log_sf = vec![-dh_dlam, -dh_dbeta];
                g.d_log_pdf = vec![t - dh_dlam, beta.recip() - dh_dbeta];
            }
            Family::Dagum => {
                sf_side = false;
                let (t1, t2, t3) = (p[0], p[1], p[2]);
                let lt = t.ln();
                let ls = t2.ln() - t3 * lt;
                let l1 = softplus(ls);
                let frac = sigmoid(ls);
                g.d_log_cdf = vec![-l1, -t1 * frac / t2, t1 * frac * lt];
                g.d_log_pdf = vec![
                    t1.recip() - l1,
                    t2.recip() - (t1 + one) * frac / t2,
                    t3.recip() - lt + (t1 + one) * frac * lt,
                ];
            }
            Family::SinghMaddala => {
                let (g1, g2, g3) = (p[0], p[1], p[2]);
                let lt = t.ln();
                let ls = g2.ln() + g3 * lt;
                let l1 = softplus(ls);
                let frac = sigmoid(ls);
                g.d_log_sf = vec![-l1, -g1 * frac / g2, -g1 * frac * lt];
                g.d_log_pdf = vec![
                    g1.recip() - l1,
                    g2.recip() - (g1 + one) * frac / g2,
                    g3.recip() + lt - (g1 + one) * frac * lt,
                ];
            }
            Family::ExpPareto => {
                sf_side = false;
                let (theta, k, gamma) = (p[0], p[1], p[2]);
                let lr = (theta / t).ln();
                let lq = k * lr;
                let l1q = log1mexp(lq);
                // q / (1 - q)
                let odds = (lq - l1q).exp();
                g.d_log_cdf = vec![-gamma * k * odds / theta, -gamma * lr * odds, l1q];
                g.d_log_pdf = vec![
                    k / theta - (gamma - one) * k * odds / theta,
                    k.recip() + lr - (gamma - one) * lr * odds,
                    gamma.recip() + l1q,
                ];
            }
            Family::ModifiedWeibull => {
                let (sigma, beta, gamma) = (p[0], p[1], p[2]);
                let lt = t.ln();
                let tg = (gamma * lt).exp();
                let tg1 = ((gamma - one) * lt).exp();
                let rate = sigma + beta * gamma * tg1;
                g.d_log_sf = vec![-t, -tg, -beta * tg * lt];
                g.d_log_pdf = vec![
                    rate.recip() - t,
                    gamma * tg1 / rate - tg,
                    (beta * tg1 + beta * gamma * tg1 * lt) / rate - beta * tg * lt,
                ];
            }
            Family::ExtendedWeibull(shape) => {
                let (delta, theta) = (p[0], &p[1..]);
                let zc = shape.cumulative(t, theta);
                let zr = shape.rate(t, theta);
                let (dzc, dzr) = shape.gradient(t, theta);
                g.d_log_sf[0] = -zc;
                g.d_log_pdf[0] = delta.recip() - zc;
                for i in 0..theta.len() {
                    g.d_log_sf[i + 1] = -delta * dzc[i];
                    g.d_log_pdf[i + 1] = dzr[i] / zr - delta * dzc[i];
                }
            }
        }
        if sf_side {
            let ratio = (ev.log_sf - ev.log_cdf).exp();
            for i in 0..k {
                g.d_log_cdf[i] = -g.d_log_sf[i] * ratio;
            }
        } else {
            let ratio = (ev.log_cdf - ev.log_sf).exp();
            for i in 0..k {
                g.d_log_sf[i] = -g.d_log_cdf[i] * ratio;
            }
        }
        g
    }

    /// Quantile `G^{-1}(u)`.
    ///
    /// ```
    /// use bkwg::baseline::Baseline;
    /// let b = Baseline::exponential(1.0f64).unwrap();
    /// assert!((b.quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
    /// ```
    pub fn quantile(&self, u: T) -> Result<T> {
        self.quantile_pair(u, T::one() - u)
    }

    /// Quantile from the pair `(u, 1 - u)`; pass the upper member exactly
    /// when `u` is close to 1.
    pub fn quantile_pair(&self, u: T, v: T) -> Result<T> {
        if !(u >= T::zero() && v >= T::zero()) {
            return domain(format!("probability must lie in [0, 1], got {u}"));
        }
        let low = self.support_low();
        if u == T::zero() {
            return Ok(low);
        }
        if v == T::zero() {
            return Ok(T::infinity());
        }
        let half = T::lit(0.5);
        let ls = if u < half { (-u).ln_1p() } else { v.ln() };
        let lc = if u < half { u.ln() } else { (-v).ln_1p() };
        let h = -ls;
        let p = &self.params;
        let one = T::one();
        let t = match &self.family {
            Family::Exponential => h / p[0],
            Family::Weibull => ((h / p[0]).ln() / p[1]).exp(),
            Family::Lomax => p[1] * (h / p[0]).exp_m1(),
            Family::Frechet => p[1] * ((-lc).ln() * (-p[0].recip())).exp(),
            Family::Gompertz => (p[0] * h / p[1]).ln_1p() / p[0],
            Family::Dagum => {
                let s = (-lc / p[0]).exp_m1();
                ((p[1] / s).ln() / p[2]).exp()
            }
            Family::SinghMaddala => {
                let s = (h / p[0]).exp_m1();
                ((s / p[1]).ln() / p[2]).exp()
            }
            Family::ExpPareto => {
                let q = -(lc / p[2]).exp_m1();
                p[0] * (q.ln() * (-p[1].recip())).exp()
            }
            Family::ModifiedWeibull => {
                let (sigma, beta, gamma) = (p[0], p[1], p[2]);
                let cum = |t: T| sigma * t + beta * t.powf(gamma);
                solve_increasing(cum, h, T::zero(), one)?
            }
            Family::ExtendedWeibull(shape) => {
                let (delta, theta) = (p[0], &p[1..]);
                let y = h / delta;
                match shape.inverse(y, theta) {
                    Some(t) => t,
                    None => {
                        let lo = shape.support_low(theta);
                        solve_increasing(|t| shape.cumulative(t, theta), y, lo, lo + one)?
                    }
                }
            }
        };
        Ok(t.max(low))
    }
}

fn softplus<T: Real>(x: T) -> T {
    // ln(1 + e^x)
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid<T: Real>(x: T) -> T {
    // e^x / (1 + e^x)
    if x > T::zero() {
        (T::one() + (-x).exp()).recip()
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

fn validate<T: Real>(family: &Family<T>, params: &[T]) -> Result<()> {
    let arity = family.arity();
    if params.len() != arity {
        return domain(format!(
            "{} expects {} parameters, got {}",
            family.id(),
            arity,
            params.len()
        ));
    }
    match family {
        Family::ModifiedWeibull => {
            let (sigma, beta, gamma) = (params[0], params[1], params[2]);
            let ok = sigma >= T::zero()
                && beta >= T::zero()
                && sigma + beta > T::zero()
                && gamma > T::zero()
                && params.iter().all(|v| v.is_finite());
            if ok {
                Ok(())
            } else {
                domain("modified_weibull needs sigma, beta >= 0, sigma + beta > 0, gamma > 0")
            }
        }
        Family::ExtendedWeibull(shape) => {
            positive_all(&params[..1])?;
            shape.validate(&params[1..])
        }
        _ => positive_all(params),
    }
}

/// Solves `f(t) = target` for increasing `f` on `[lo, inf)` by bracketing
/// and Illinois false position.
pub(crate) fn solve_increasing<T: Real, F: Fn(T) -> T>(f: F, target: T, lo: T, start: T) -> Result<T> {
    let mut a = lo;
    let mut fa = f(a) - target;
    if fa >= T::zero() {
        return Ok(a);
    }
    let mut b = start.max(lo + T::one());
    let mut fb = f(b) - target;
    let mut grow = 0;
    while fb < T::zero() {
        a = b;
        fa = fb;
        b = lo + (b - lo) * T::lit(2.0);
        fb = f(b) - target;
        grow += 1;
        if grow > 2000 || !b.is_finite() {
            return Err(Error::Convergence {
                routine: "quantile bracket",
                iterations: grow,
            });
        }
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let c = if fb != fa { b - fb * (b - a) / (fb - fa) } else { T::lit(0.5) * (a + b) };
        let c = if c > a && c < b { c } else { T::lit(0.5) * (a + b) };
        let fc = f(c) - target;
        if fc == T::zero() || (b - a) <= T::lit(4.0) * T::epsilon() * c.abs().max(T::min_positive_value()) {
            return Ok(c);
        }
        if fc < T::zero() {
            a = c;
            fa = fc;
            if side == -1 {
                fb = fb * T::lit(0.5);
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa = fa * T::lit(0.5);
            }
            side = 1;
        }
    }
    Ok(T::lit(0.5) * (a + b))
}
