//! The Beta-Kumaraswamy-G distribution.
//!
//! With baseline cdf `G` and density `g`, the density is
//!
//! ```text
//! f(t) = a b g G^{a-1} (1 - G^a)^{b n - 1} {1 - (1 - G^a)^b}^{m - 1} / B(m, n)
//! ```
//!
//! and the cdf is `I_W(m, n)` with `W = 1 - (1 - G^a)^b`. Everything is
//! evaluated through the logs of `G`, `X = 1 - G^a` and `W` so that powers
//! with negative exponents stay finite away from the support edges.

use crate::baseline::Baseline;
use crate::error::{domain, Result};
use crate::quadrature::{integrate, integrate_unit, Quad, QuadConfig};
use crate::real::{exprel, log1mexp, mul_log, Real};
use crate::rng::UniformStream;
use crate::specialfn::{inc_beta_tails, inv_reg_inc_beta_pair, lbeta, BetaTails, Tolerance};

/// Logs of the generator building blocks at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorTerms<T> {
    /// `ln g(t)`
    pub log_g: T,
    /// `ln G(t)`
    pub log_cdf: T,
    /// `ln(1 - G(t))`
    pub log_sf: T,
    /// `ln X = ln(1 - G^a)`
    pub log_x: T,
    /// `ln(-ln X)`, finite even when `X` rounds to 1
    pub log_neg_log_x: T,
    /// `ln X^b`, the log of the Kumaraswamy-G survival function
    pub log_xb: T,
    /// `ln W = ln(1 - X^b)`, the log of the Kumaraswamy-G cdf
    pub log_w: T,
}

/// A BKw-G law: generator shapes `(m, n, a, b)` over a baseline.
#[derive(Debug, Clone)]
pub struct BKw<T: Real> {
    m: T,
    n: T,
    a: T,
    b: T,
    baseline: Baseline<T>,
    log_beta: T,
}

/// Kind of a stationary point of `ln f` or `ln h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Max,
    Min,
    Inflexion,
}

/// Overall shape of a density or hazard curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unimodal,
    Bathtub,
    Other,
}

/// Which curve [`BKw::critical_points`] inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeTarget {
    Density,
    Hazard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint<T> {
    pub t: T,
    pub kind: CriticalKind,
    /// Second derivative of the log-curve at `t`.
    pub curvature: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport<T> {
    pub critical_points: Vec<CriticalPoint<T>>,
    pub monotonicity: Monotonicity,
}

/// Upper-tail decay rates estimated from far quantiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRates<T> {
    /// `-d ln S / d ln t`: moments of order below this exist.
    pub power: T,
    /// `-d ln S / dt`: the mgf exists below this.
    pub exponential: T,
}

impl<T: Real> BKw<T> {
    /// Builds the law; all four shapes must be positive and finite.
    ///
    /// ```
    /// use bkwg::{baseline::Baseline, bkw::BKw};
    /// let d = BKw::new(1.0, 1.0, 1.0, 1.0, Baseline::exponential(1.0f64).unwrap()).unwrap();
    /// assert!((d.pdf(0.0) - 1.0).abs() < 1e-15);
    /// assert!((d.quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-12);
    /// ```
    pub fn new(m: T, n: T, a: T, b: T, baseline: Baseline<T>) -> Result<Self> {
        for (name, v) in [("m", m), ("n", n), ("a", a), ("b", b)] {
            if !(v > T::zero() && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self {
            m,
            n,
            a,
            b,
            baseline,
            log_beta: lbeta(m, n),
        })
    }

    /// Kumaraswamy-G law, the `m = n = 1` member.
    pub fn kumaraswamy(a: T, b: T, baseline: Baseline<T>) -> Result<Self> {
        Self::new(T::one(), T::one(), a, b, baseline)
    }

    /// Beta-G law, the `a = b = 1` member.
    pub fn beta(m: T, n: T, baseline: Baseline<T>) -> Result<Self> {
        Self::new(m, n, T::one(), T::one(), baseline)
    }

    pub fn m(&self) -> T {
        self.m
    }
    pub fn n(&self) -> T {
        self.n
    }
    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn baseline(&self) -> &Baseline<T> {
        &self.baseline
    }
    pub fn log_beta(&self) -> T {
        self.log_beta
    }
    pub fn support_low(&self) -> T {
        self.baseline.support_low()
    }

    /// Same law with a different second Kumaraswamy shape (used by mixtures).
    pub fn with_b(&self, b: T) -> Result<Self> {
        Self::new(self.m, self.n, self.a, b, self.baseline.clone())
    }

    /// Generator logs at `t`.
    pub fn terms(&self, t: T) -> GeneratorTerms<T> {
        let ev = self.baseline.eval(t);
        self.terms_from(ev.log_cdf, ev.log_sf, ev.log_pdf)
    }

    pub(crate) fn terms_from(&self, log_cdf: T, log_sf: T, log_g: T) -> GeneratorTerms<T> {
        let (a, b) = (self.a, self.b);
        let ninf = T::neg_infinity();
        if log_cdf == ninf {
            return GeneratorTerms {
                log_g,
                log_cdf,
                log_sf,
                log_x: T::zero(),
                log_neg_log_x: ninf,
                log_xb: T::zero(),
                log_w: ninf,
            };
        }
        let la = a * log_cdf;
        let (log_x, log_neg_log_x) = if log_sf < T::lit(-20.0) {
            // G within 2e-9 of 1: -ln G ~ 1 - G, so G^a ~ 1 - a (1 - G)
            let lneg_a = a.ln() + log_sf;
            let lx = lneg_a + exprel(-lneg_a.exp()).ln();
            (lx, (-lx).ln())
        } else {
            let lx = log1mexp(la);
            let lnlx = if la < T::lit(-30.0) {
                la + T::lit(0.5) * la.exp()
            } else {
                (-lx).ln()
            };
            (lx, lnlx)
        };
        let log_xb = b * log_x;
        let log_w = if log_xb > T::lit(-0.5) {
            b.ln() + log_neg_log_x + exprel(log_xb).ln()
        } else {
            log1mexp(log_xb)
        };
        GeneratorTerms {
            log_g,
            log_cdf,
            log_sf,
            log_x,
            log_neg_log_x,
            log_xb,
            log_w,
        }
    }

    fn log_pdf_from(&self, tm: &GeneratorTerms<T>) -> T {
        let one = T::one();
        self.a.ln() + self.b.ln() + tm.log_g - self.log_beta
            + mul_log(self.a - one, tm.log_cdf)
            + mul_log(self.b * self.n - one, tm.log_x)
            + mul_log(self.m - one, tm.log_w)
    }

    /// Log-density; `-inf` below the support, the limiting value at its edge.
    pub fn log_pdf(&self, t: T) -> T {
        let low = self.support_low();
        if t < low || t.is_nan() {
            return T::neg_infinity();
        }
        let v = self.log_pdf_from(&self.terms(t));
        if v.is_nan() {
            // edge where the baseline density vanishes against a diverging power
            let nudge = (low.abs() * T::epsilon()).max(T::min_positive_value());
            return self.log_pdf_from(&self.terms(low + nudge));
        }
        v
    }

    pub fn pdf(&self, t: T) -> T {
        self.log_pdf(t).exp()
    }

    /// Log of both tails `(cdf, sf)` at `t`.
    pub fn log_tails(&self, t: T) -> BetaTails<T> {
        self.log_tails_from(&self.terms(t))
    }

    fn log_tails_from(&self, tm: &GeneratorTerms<T>) -> BetaTails<T> {
        let ninf = T::neg_infinity();
        if tm.log_w == ninf {
            return BetaTails {
                ln_lower: ninf,
                ln_upper: T::zero(),
            };
        }
        if tm.log_xb == ninf {
            return BetaTails {
                ln_lower: T::zero(),
                ln_upper: ninf,
            };
        }
        inc_beta_tails(
            tm.log_w.exp(),
            tm.log_xb.exp(),
            tm.log_w,
            tm.log_xb,
            self.m,
            self.n,
            &Tolerance::default(),
        )
        .unwrap_or(BetaTails {
            ln_lower: T::nan(),
            ln_upper: T::nan(),
        })
    }

    pub fn cdf(&self, t: T) -> T {
        self.log_tails(t).lower()
    }

    /// Survival function, computed from the upper tail directly.
    pub fn sf(&self, t: T) -> T {
        self.log_tails(t).upper()
    }

    /// Cumulative hazard `-ln sf`; `+inf` once the survival underflows.
    pub fn chrf(&self, t: T) -> T {
        -self.log_tails(t).ln_upper
    }

    /// Hazard rate `f / sf`.
    pub fn hrf(&self, t: T) -> T {
        if t < self.support_low() {
            return T::zero();
        }
        let tm = self.terms(t);
        let lp = self.log_pdf(t);
        (lp - self.log_tails_from(&tm).ln_upper).exp()
    }

    /// Reverse hazard rate `f / cdf`.
    pub fn rhrf(&self, t: T) -> T {
        if t < self.support_low() {
            return T::zero();
        }
        let tm = self.terms(t);
        let lp = self.log_pdf(t);
        let lc = self.log_tails_from(&tm).ln_lower;
        if lc == T::neg_infinity() && lp == T::neg_infinity() {
            return T::zero();
        }
        (lp - lc).exp()
    }

    /// Quantile `Q(u)`.
    pub fn quantile(&self, u: T) -> Result<T> {
        if !(u >= T::zero() && u <= T::one()) {
            return domain(format!("probability must lie in [0, 1], got {u}"));
        }
        self.quantile_pair(u, T::one() - u)
    }

    /// Quantile for the pair `(u, 1 - u)`; pass `v` exactly for upper tails.
    pub fn quantile_pair(&self, u: T, v: T) -> Result<T> {
        let (z, zc) = inv_reg_inc_beta_pair(u, v, self.m, self.n, &Tolerance::default())?;
        if z == T::zero() {
            return Ok(self.support_low());
        }
        if zc == T::zero() {
            return Ok(T::infinity());
        }
        // X^b = 1 - z, X = 1 - G^a, G = (1 - X)^{1/a}
        let log_xb = if z < T::lit(0.5) { (-z).ln_1p() } else { zc.ln() };
        let log_x = log_xb / self.b;
        let log_ga = log1mexp(log_x);
        let log_g = log_ga / self.a;
        let g = log_g.exp();
        let gc = -log_g.exp_m1();
        self.baseline.quantile_pair(g, gc)
    }

    /// Upper-tail quantile: the `t` with `sf(t) = q`.
    pub fn quantile_upper(&self, q: T) -> Result<T> {
        self.quantile_pair(T::one() - q, q)
    }

    /// Inverse-transform sample of `count` draws from stream 0 of `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<T>> {
        let mut stream = UniformStream::new(seed, 0);
        self.sample_from(&mut stream, count)
    }

    pub fn sample_from(&self, stream: &mut UniformStream, count: usize) -> Result<Vec<T>> {
        (0..count)
            .map(|_| {
                let (u, v) = stream.next_pair();
                self.quantile_pair(u, v)
            })
            .collect()
    }

    /// Quartile skewness `(Q3 + Q1 - 2 Q2) / (Q3 - Q1)`.
    pub fn bowley_skewness(&self) -> Result<T> {
        let q = |p: f64| self.quantile(T::lit(p));
        let (q1, q2, q3) = (q(0.25)?, q(0.5)?, q(0.75)?);
        Ok((q3 + q1 - T::lit(2.0) * q2) / (q3 - q1))
    }

    /// Octile kurtosis `(E7 - E5 + E3 - E1) / (E6 - E2)`.
    pub fn moors_kurtosis(&self) -> Result<T> {
        let e = |k: f64| self.quantile(T::lit(k / 8.0));
        let num = e(3.0)? - e(1.0)? + e(7.0)? - e(5.0)?;
        Ok(num / (e(6.0)? - e(2.0)?))
    }

    /// `d ln f / dt`.
    pub fn dlog_pdf_dt(&self, t: T) -> T {
        let tm = self.terms(t);
        let one = T::one();
        let (a, b) = (self.a, self.b);
        let base = tm.log_g + (a - one) * tm.log_cdf;
        let r_g = (tm.log_g - tm.log_cdf).exp();
        let r_x = a * (base - tm.log_x).exp();
        let r_w = a * b * (base + (b - one) * tm.log_x - tm.log_w).exp();
        let mut s = self.baseline.dlog_pdf_dt(t);
        if a != one {
            s += (a - one) * r_g;
        }
        if b * self.n != one {
            s -= (b * self.n - one) * r_x;
        }
        if self.m != one {
            s += (self.m - one) * r_w;
        }
        s
    }

    /// `d ln h / dt = d ln f / dt + h`.
    pub fn dlog_hrf_dt(&self, t: T) -> T {
        self.dlog_pdf_dt(t) + self.hrf(t)
    }

    /// Stationary points of `ln f` or `ln h`, bracketed on a grid of 2048
    /// points uniform in probability and refined by bisection.
    ///
    /// `interval` restricts the search to `[t_lo, t_hi]`; by default the grid
    /// spans the `1e-4` and `1 - 1e-4` quantiles.
    pub fn critical_points(
        &self,
        target: ShapeTarget,
        interval: Option<(T, T)>,
    ) -> Result<ShapeReport<T>> {
        let (u_lo, u_hi) = match interval {
            Some((lo, hi)) => {
                if !(lo < hi) || lo < self.support_low() {
                    return domain("search interval must be increasing and inside the support");
                }
                (self.cdf(lo), self.cdf(hi))
            }
            None => (T::lit(1e-4), T::one() - T::lit(1e-4)),
        };
        let deriv = |t: T| match target {
            ShapeTarget::Density => self.dlog_pdf_dt(t),
            ShapeTarget::Hazard => self.dlog_hrf_dt(t),
        };
        const GRID: usize = 2048;
        let mut ts = Vec::with_capacity(GRID);
        for i in 0..GRID {
            let u = u_lo + (u_hi - u_lo) * T::of(i) / T::of(GRID - 1);
            let t = match (i, interval) {
                (0, Some((lo, _))) => lo,
                (i, Some((_, hi))) if i == GRID - 1 => hi,
                _ => self.quantile(u)?,
            };
            if ts.last().map_or(true, |&p| t > p) {
                ts.push(t);
            }
        }
        let ds: Vec<T> = ts.iter().map(|&t| deriv(t)).collect();
        let mut points = Vec::new();
        let mut signs = Vec::new();
        for i in 0..ts.len() - 1 {
            let (d0, d1) = (ds[i], ds[i + 1]);
            if !(d0.is_finite() && d1.is_finite()) {
                continue;
            }
            if d0 != T::zero() {
                signs.push(d0 > T::zero());
            }
            if (d0 > T::zero()) != (d1 > T::zero()) && d0 != T::zero() && d1 != T::zero() {
                let (mut lo, mut hi) = (ts[i], ts[i + 1]);
                let scale = hi.abs().max(T::one());
                let lo_pos = d0 > T::zero();
                while hi - lo > T::lit(1e-10) * scale {
                    let mid = T::lit(0.5) * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if (deriv(mid) > T::zero()) == lo_pos {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let root = T::lit(0.5) * (lo + hi);
                let h = T::epsilon().cbrt() * root.abs().max(T::lit(1e-3));
                let curvature = (deriv(root + h) - deriv(root - h)) / (h + h);
                let kind = if curvature < T::zero() {
                    CriticalKind::Max
                } else if curvature > T::zero() {
                    CriticalKind::Min
                } else {
                    CriticalKind::Inflexion
                };
                points.push(CriticalPoint {
                    t: root,
                    kind,
                    curvature,
                });
            }
        }
        let monotonicity = match points.as_slice() {
            [] => {
                if signs.iter().all(|&s| s) {
                    Monotonicity::Increasing
                } else if signs.iter().all(|&s| !s) {
                    Monotonicity::Decreasing
                } else {
                    Monotonicity::Other
                }
            }
            [p] if p.kind == CriticalKind::Max => Monotonicity::Unimodal,
            [p] if p.kind == CriticalKind::Min => Monotonicity::Bathtub,
            _ => Monotonicity::Other,
        };
        Ok(ShapeReport {
            critical_points: points,
            monotonicity,
        })
    }

    /// Decay rates of the upper tail from the `1 - 1e-8` and `1 - 1e-10` quantiles.
    pub fn tail_rates(&self) -> Result<TailRates<T>> {
        let (q1, q2) = (T::lit(1e-8), T::lit(1e-10));
        let t1 = self.quantile_upper(q1)?;
        let t2 = self.quantile_upper(q2)?;
        let dls = q1.ln() - q2.ln();
        if !(t2 > t1) || !t2.is_finite() {
            return Ok(TailRates {
                power: T::infinity(),
                exponential: T::infinity(),
            });
        }
        Ok(TailRates {
            power: dls / (t2.ln() - t1.ln()),
            exponential: dls / (t2 - t1),
        })
    }

    /// `E[h(T)] = ∫_0^1 h(Q(u)) du`.
    pub fn expect<F: FnMut(T) -> T>(&self, mut h: F, cfg: &QuadConfig<T>) -> Result<Quad<T>> {
        integrate_unit(
            |u, v| match self.quantile_pair(u, v) {
                Ok(t) => h(t),
                Err(_) => T::nan(),
            },
            cfg,
        )
    }

    /// `∫ phi(t) dt` over the support, substituting `t = Q_G(v)` so the
    /// integrand becomes `phi(t) / g(t)` on the unit interval.
    pub fn integrate_support<F: FnMut(T) -> T>(&self, mut phi: F, cfg: &QuadConfig<T>) -> Result<Quad<T>> {
        integrate_unit(
            |v, w| match self.baseline.quantile_pair(v, w) {
                Ok(t) => {
                    let lg = self.baseline.log_pdf(t);
                    let val = phi(t);
                    if val == T::zero() {
                        T::zero()
                    } else {
                        val / lg.exp()
                    }
                }
                Err(_) => T::nan(),
            },
            cfg,
        )
    }

    /// `∫_{low}^{t} f(s) ds` by adaptive quadrature in baseline-probability space.
    pub fn cdf_by_quadrature(&self, t: T, cfg: &QuadConfig<T>) -> Result<T> {
        let low = self.support_low();
        if t <= low {
            return Ok(T::zero());
        }
        let gt = self.baseline.cdf(t);
        // ∫_0^{G(t)} f(Q_G(v)) / g(Q_G(v)) dv
        let q = integrate(
            |v| match self.baseline.quantile(v) {
                Ok(s) => (self.log_pdf(s) - self.baseline.log_pdf(s)).exp(),
                Err(_) => T::nan(),
            },
            T::zero(),
            gt,
            cfg,
        )?;
        Ok(q.value)
    }

    /// Density of the `r`-th order statistic among `size` draws, from the
    /// closed-form pdf and cdf.
    pub fn order_statistic_pdf(&self, r: usize, size: usize, t: T) -> Result<T> {
        if r == 0 || r > size {
            return domain(format!("need 1 <= r <= size, got r={r}, size={size}"));
        }
        let tails = self.log_tails(t);
        let log_c = crate::specialfn::lgamma(T::of(size + 1))
            - crate::specialfn::lgamma(T::of(r))
            - crate::specialfn::lgamma(T::of(size - r + 1));
        let v = log_c
            + self.log_pdf(t)
            + mul_log(T::of(r - 1), tails.ln_lower)
            + mul_log(T::of(size - r), tails.ln_upper);
        Ok(v.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{Baseline, Family};

    fn weibull(l: f64, b: f64) -> Baseline<f64> {
        Baseline::weibull(l, b).unwrap()
    }

    fn direct_pdf(d: &BKw<f64>, t: f64) -> f64 {
        let bs = d.baseline();
        let (g, gg) = (bs.pdf(t), bs.cdf(t));
        let x = 1.0 - gg.powf(d.a());
        let w = 1.0 - x.powf(d.b());
        d.a() * d.b() * g * gg.powf(d.a() - 1.0) * x.powf(d.b() * d.n() - 1.0) * w.powf(d.m() - 1.0)
            / d.log_beta().exp()
    }

    #[test]
    fn exponential_reduction() {
        let d = BKw::new(1.0, 1.0, 1.0, 1.0, Baseline::exponential(1.0f64).unwrap()).unwrap();
        assert!((d.pdf(0.0) - 1.0).abs() < 1e-15);
        for &t in &[0.1f64, 1.0, 3.0] {
            assert!((d.hrf(t) - 1.0).abs() < 1e-12);
            assert!((d.cdf(t) - (1.0 - (-t).exp())).abs() < 1e-15);
        }
        assert!((d.cdf(2f64.ln()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_space_matches_direct_formula_in_the_bulk() {
        let d = BKw::new(2.6, 0.3, 0.21, 0.78, weibull(4.6, 2.9)).unwrap();
        for i in 1..50 {
            let t = d.quantile(i as f64 / 50.0).unwrap();
            let (x, y) = (d.pdf(t), direct_pdf(&d, t));
            // the direct form loses about eps / (1 - G) relative to 1 - G^a
            let tol = 1e-13 / d.baseline().sf(t).min(1.0);
            assert!((x - y).abs() <= tol * y.max(1.0), "{t}: {x} vs {y}");
        }
    }

    #[test]
    fn far_tails_stay_finite() {
        let d = BKw::new(2.0, 3.0, 0.5, 2.0, weibull(1.0, 1.0)).unwrap();
        let t = 60.0;
        let lp = d.log_pdf(t);
        assert!(lp.is_finite());
        // sf ~ X^{bn} / (n B) with X = 1 - G^a ~ a e^{-t}
        let expected = 6.0 * (0.5f64.ln() - t) - (3.0 * d.log_beta().exp()).ln();
        assert!((d.log_tails(t).ln_upper - expected).abs() < 1e-6);
        let t0 = 1e-12;
        let lead = 2.0 * d.terms(t0).log_w - (2.0 * d.log_beta().exp()).ln();
        assert!((d.log_tails(t0).ln_lower - lead).abs() < 1e-4);
    }

    #[test]
    fn sf_cdf_complement_and_chrf() {
        let d = BKw::new(1.7, 2.2, 1.3, 0.6, weibull(0.9, 1.4)).unwrap();
        for i in 1..100 {
            let t = 0.05 * i as f64;
            assert!((d.sf(t) + d.cdf(t) - 1.0).abs() <= 1e-14);
            assert!((d.chrf(t) + d.sf(t).ln()).abs() <= 1e-12 * d.chrf(t).max(1.0));
            assert!((d.hrf(t) * d.sf(t) - d.pdf(t)).abs() <= 1e-12 * d.pdf(t).max(1e-300));
        }
    }

    #[test]
    fn quantile_round_trip_and_edges() {
        let d = BKw::new(0.7, 3.1, 2.2, 0.4, Baseline::new(Family::Lomax, vec![2.0, 1.5]).unwrap())
            .unwrap();
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let t = d.quantile(u).unwrap();
            assert!((d.cdf(t) - u).abs() <= 1e-9, "u={u}");
        }
        assert_eq!(d.quantile(0.0).unwrap(), 0.0);
        assert!(d.quantile(1.0).unwrap().is_infinite());
        assert!(d.quantile(1.5).is_err());
        let t = d.quantile_upper(1e-12).unwrap();
        assert!((d.sf(t) / 1e-12 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn exponential_quantile_closed_form() {
        let (a, b, lam) = (1.7, 0.6, 2.0);
        let d = BKw::kumaraswamy(a, b, Baseline::exponential(lam).unwrap()).unwrap();
        for &p in &[0.1f64, 0.5, 0.93] {
            let expected = -(1.0 - (1.0 - (1.0 - p).powf(1.0 / b)).powf(1.0 / a)).ln() / lam;
            assert!((d.quantile(p).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = BKw::new(2.0, 3.0, 1.5, 0.8, weibull(1.0, 2.0)).unwrap();
        let a = d.sample(5, 99).unwrap();
        assert_eq!(a, d.sample(5, 99).unwrap());
        assert_ne!(a, d.sample(5, 100).unwrap());
    }

    #[test]
    fn shape_measures() {
        let d = BKw::new(2.0, 2.0, 1.0, 1.0, weibull(1.0, 3.6)).unwrap();
        let b = d.bowley_skewness().unwrap();
        assert!(b.abs() <= 1.0);
        assert!(d.moors_kurtosis().unwrap() > 0.0);
    }

    #[test]
    fn exponential_density_is_monotone() {
        let d = BKw::new(1.0, 1.0, 1.0, 1.0, Baseline::exponential(1.0).unwrap()).unwrap();
        let r = d.critical_points(ShapeTarget::Density, None).unwrap();
        assert!(r.critical_points.is_empty());
        assert_eq!(r.monotonicity, Monotonicity::Decreasing);
    }

    #[test]
    fn log_pdf_slope_matches_difference() {
        let d = BKw::new(2.6, 0.3, 0.21, 0.78, weibull(4.6, 2.9)).unwrap();
        for &u in &[0.05, 0.3, 0.7, 0.97] {
            let t = d.quantile(u).unwrap();
            let h = 1e-6 * t;
            let fd = (d.log_pdf(t + h) - d.log_pdf(t - h)) / (2.0 * h);
            assert!((fd - d.dlog_pdf_dt(t)).abs() < 1e-5 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn order_statistic_of_one_draw_is_pdf() {
        let d = BKw::new(2.0, 3.0, 1.5, 0.8, weibull(1.0, 2.0)).unwrap();
        let t = 0.7;
        assert!((d.order_statistic_pdf(1, 1, t).unwrap() - d.pdf(t)).abs() < 1e-14);
        assert!(d.order_statistic_pdf(0, 1, t).is_err());
    }
}
