//! Expansions of a BKw-G law in Kumaraswamy-G pieces, and the moments,
//! order statistics, mgf and Rényi entropy built on top of them.
//!
//! Write `F`, `f` for the Kumaraswamy-G(a, b) cdf and density over the same
//! baseline, and `S = 1 - F = (1 - G^a)^b`. For integer `m` the density is a
//! finite mixture
//!
//! ```text
//! f_BKw(t) = Σ_j β'_j f_Kw(t; a, b (j + n)) = f(t) Σ_j β_j S^{j + n - 1}
//! ```
//!
//! and for integer `m`, `n` it is also `f(t) Σ_l η_l F^l`. Coefficient
//! routes refuse non-integer shapes instead of guessing at the convergence
//! of generalized binomial series; quadrature is always available and is
//! the reference value.

use crate::bkw::{BKw, GeneratorTerms};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_unit, QuadConfig};
use crate::real::{mul_log, Real};
use crate::specialfn::lbeta;

/// Which coefficient family a [`SeriesCoeffs`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    BetaPrime,
    Beta,
    Eta,
    Mu,
    LambdaPq,
    Chi,
    DPower,
}

/// A coefficient vector (or the `λ_{p,q}` matrix) with its truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoeffs<T> {
    pub kind: CoeffKind,
    /// Row-major; a single row except for `LambdaPq`.
    pub values: Vec<T>,
    pub rows: usize,
    pub cols: usize,
    /// Power carried by the first entry (`p = m` for the first `λ` row,
    /// the factored-out order for `DPower`).
    pub offset: usize,
    /// Highest index kept.
    pub truncation: usize,
    /// Magnitude of the last kept term when the series was cut short, else 0.
    pub tail_bound: T,
}

impl<T: Real> SeriesCoeffs<T> {
    fn vector(kind: CoeffKind, values: Vec<T>, offset: usize, tail_bound: T) -> Self {
        let cols = values.len();
        Self {
            kind,
            values,
            rows: 1,
            cols,
            offset,
            truncation: cols.saturating_sub(1),
            tail_bound,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> T {
        self.values.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn at(&self, row: usize, col: usize) -> T {
        self.values[row * self.cols + col]
    }

    /// `Σ_k c_k x^{offset + k}`, or `Σ λ_{p,q} x^{p + q}` for the matrix.
    pub fn eval_power(&self, x: T) -> T {
        if self.kind == CoeffKind::LambdaPq {
            let mut s = T::zero();
            for i in 0..self.rows {
                for q in 0..self.cols {
                    s += self.at(i, q) * x.powi((self.offset + i + q) as i32);
                }
            }
            return s;
        }
        horner(&self.values, x) * x.powi(self.offset as i32)
    }
}

/// Result of a quantity computed by more than one route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck<T> {
    /// The value returned to callers.
    pub value: T,
    /// Series or mixture route, when the shapes allow one.
    pub series: Option<T>,
    /// Second series route (the `η` route for moments).
    pub alternate: Option<T>,
    pub quadrature: T,
}

fn horner<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &v| acc * x + v)
}

/// Generalized binomial coefficient `C(x, k)`.
pub fn binom<T: Real>(x: T, k: usize) -> T {
    let mut c = T::one();
    for i in 0..k {
        c *= (x - T::of(i)) / T::of(i + 1);
    }
    c
}

fn sign<T: Real>(k: usize) -> T {
    if k % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

fn whole<T: Real>(x: T, what: &str) -> Result<usize> {
    if x >= T::one() && x.fract() == T::zero() && x <= T::lit(1e6) {
        Ok(x.to_usize().unwrap_or(0))
    } else {
        Err(Error::UnsupportedExpansion(format!(
            "{what} = {x} must be a positive integer for this expansion"
        )))
    }
}

fn log_kw_pdf<T: Real>(tm: &GeneratorTerms<T>, a: T, b: T) -> T {
    let one = T::one();
    a.ln() + b.ln() + tm.log_g + mul_log(a - one, tm.log_cdf) + mul_log(b - one, tm.log_x)
}

/// `β'_j = (-1)^j C(m-1, j) / (B(m, n) (j + n))`, `j = 0..m-1`.
pub fn beta_prime_coeffs<T: Real>(m: T, n: T) -> Result<SeriesCoeffs<T>> {
    let mi = whole(m, "m")?;
    if !(n > T::zero()) {
        return domain(format!("n must be positive, got {n}"));
    }
    let inv_b = (-lbeta(m, n)).exp();
    let v = (0..mi)
        .map(|j| sign::<T>(j) * binom(m - T::one(), j) * inv_b / (T::of(j) + n))
        .collect();
    Ok(SeriesCoeffs::vector(CoeffKind::BetaPrime, v, 0, T::zero()))
}

/// `β_j = (j + n) β'_j`, the weights of `f · S^{j + n - 1}`.
pub fn beta_coeffs<T: Real>(m: T, n: T) -> Result<SeriesCoeffs<T>> {
    let mut c = beta_prime_coeffs(m, n)?;
    for (j, v) in c.values.iter_mut().enumerate() {
        *v *= T::of(j) + n;
    }
    c.kind = CoeffKind::Beta;
    Ok(c)
}

/// `η_l = (-1)^l Σ_j β_j C(j + n - 1, l)`, the weights of `f · F^l`.
pub fn eta_coeffs<T: Real>(m: T, n: T) -> Result<SeriesCoeffs<T>> {
    let mi = whole(m, "m")?;
    let ni = whole(n, "n")?;
    let beta = beta_coeffs(m, n)?;
    let top = mi + ni - 2;
    let v = (0..=top)
        .map(|l| {
            let s = (0..mi)
                .filter(|j| j + ni > l)
                .map(|j| beta.get(j) * binom(T::of(j + ni - 1), l))
                .fold(T::zero(), |a, b| a + b);
            sign::<T>(l) * s
        })
        .collect();
    Ok(SeriesCoeffs::vector(CoeffKind::Eta, v, 0, T::zero()))
}

/// Coefficients of the BKw-G cdf as a power series in `F`.
///
/// The triple sum collapses to `μ_{m+i} = (-1)^i C(n-1, i) / (B(m, n) (m + i))`
/// with all other `μ_k` zero. For integer `n` the series ends at
/// `k = m + n - 1`; otherwise it is cut at `k_max`.
pub fn mu_coeffs<T: Real>(m: T, n: T, k_max: usize) -> Result<SeriesCoeffs<T>> {
    let mi = whole(m, "m")?;
    if !(n > T::zero()) {
        return domain(format!("n must be positive, got {n}"));
    }
    let finite = n.fract() == T::zero();
    let last = if finite {
        mi + n.to_usize().unwrap_or(0) - 1
    } else {
        k_max.max(mi)
    };
    let inv_b = (-lbeta(m, n)).exp();
    let mut v = vec![T::zero(); last + 1];
    for (k, slot) in v.iter_mut().enumerate().skip(mi) {
        let i = k - mi;
        *slot = sign::<T>(i) * binom(n - T::one(), i) * inv_b / T::of(k);
    }
    let tail = if finite { T::zero() } else { v[last].abs() };
    Ok(SeriesCoeffs::vector(CoeffKind::Mu, v, 0, tail))
}

/// `λ_{p,q} = C(m+n-1, p) C(m+n-1-p, q) (-1)^q` for `p = m..m+n-1`,
/// `q = 0..m+n-1-p`; row `i` holds `p = m + i`.
pub fn lambda_pq_coeffs<T: Real>(m: T, n: T) -> Result<SeriesCoeffs<T>> {
    let mi = whole(m, "m")?;
    let ni = whole(n, "n")?;
    let top = mi + ni - 1;
    let mut v = vec![T::zero(); ni * ni];
    for i in 0..ni {
        let p = mi + i;
        for q in 0..=(top - p) {
            v[i * ni + q] = binom(T::of(top), p) * binom(T::of(top - p), q) * sign::<T>(q);
        }
    }
    Ok(SeriesCoeffs {
        kind: CoeffKind::LambdaPq,
        values: v,
        rows: ni,
        cols: ni,
        offset: mi,
        truncation: top,
        tail_bound: T::zero(),
    })
}

/// Coefficients of `(Σ_k c_k x^k)^w` by the power recursion
/// `d_k = Σ_{c=1..k} (c (w + 1) - k) c_c d_{k-c} / (k c_0)`, `d_0 = c_0^w`.
///
/// Leading zero coefficients are factored out first, so the result carries
/// `offset = w · (index of the first nonzero term)`. A finite input keeps
/// every term of the exact power up to `k_max`.
pub fn d_power<T: Real>(series: &SeriesCoeffs<T>, w: usize, k_max: usize) -> Result<SeriesCoeffs<T>> {
    let shift = match series.values.iter().position(|&c| c != T::zero()) {
        Some(s) => s,
        None => {
            return Err(Error::UnsupportedExpansion(
                "power of a series with no nonzero term".into(),
            ))
        }
    };
    let nu = &series.values[shift..];
    let exact = w * (nu.len() - 1);
    let cap = k_max.min(exact);
    let mut d = Vec::with_capacity(cap + 1);
    d.push(nu[0].powi(w as i32));
    let w1 = T::of(w + 1);
    for k in 1..=cap {
        let mut s = T::zero();
        for c in 1..=k.min(nu.len() - 1) {
            s += (T::of(c) * w1 - T::of(k)) * nu[c] * d[k - c];
        }
        d.push(s / (T::of(k) * nu[0]));
    }
    let cut = cap < exact || series.tail_bound > T::zero();
    let tail = if cut { d[cap].abs() } else { T::zero() };
    Ok(SeriesCoeffs::vector(CoeffKind::DPower, d, shift * w, tail))
}

/// `χ_z` with `f_{r:size}(t) = f(t) Σ_z χ_z S(t)^z` for integer `m`, `n`.
///
/// Built as a polynomial in `F` from `η` and powers of the `μ` series, then
/// re-expanded in `S = 1 - F`. `χ'_z = χ_z / (z + 1)` are the weights of
/// `f_Kw(t; a, b (z + 1))`.
pub fn chi_coeffs<T: Real>(m: T, n: T, r: usize, size: usize, k_max: usize) -> Result<SeriesCoeffs<T>> {
    if r == 0 || r > size {
        return domain(format!("need 1 <= r <= size, got r={r}, size={size}"));
    }
    let eta = eta_coeffs(m, n)?;
    let mu = mu_coeffs(m, n, k_max)?;
    let lead = T::of(size) * binom(T::of(size - 1), r - 1);
    let mut gamma: Vec<T> = Vec::new();
    let mut tail = T::zero();
    for j in 0..=(size - r) {
        let dw = d_power(&mu, j + r - 1, k_max)?;
        let cj = lead * sign::<T>(j) * binom(T::of(size - r), j);
        tail += cj.abs() * dw.tail_bound;
        for (l, &e) in eta.values.iter().enumerate() {
            for (k, &dk) in dw.values.iter().enumerate() {
                let s = l + dw.offset + k;
                if gamma.len() <= s {
                    gamma.resize(s + 1, T::zero());
                }
                gamma[s] += cj * e * dk;
            }
        }
    }
    // x^s = (1 - y)^s
    let chi = (0..gamma.len())
        .map(|z| {
            let s = (z..gamma.len())
                .map(|s| gamma[s] * binom(T::of(s), z))
                .fold(T::zero(), |a, b| a + b);
            sign::<T>(z) * s
        })
        .collect();
    Ok(SeriesCoeffs::vector(CoeffKind::Chi, chi, 0, tail))
}

/// `Σ_j β'_j f_Kw(t; a, b (j + n))`.
pub fn mixture_pdf<T: Real>(d: &BKw<T>, t: T) -> Result<T> {
    let c = beta_prime_coeffs(d.m(), d.n())?;
    if t <= d.support_low() {
        return Ok(d.pdf(t));
    }
    let tm = d.terms(t);
    Ok(c
        .values
        .iter()
        .enumerate()
        .map(|(j, &w)| w * log_kw_pdf(&tm, d.a(), d.b() * (T::of(j) + d.n())).exp())
        .fold(T::zero(), |a, b| a + b))
}

/// `f(t) Σ_j β_j S^{j + n - 1}`.
pub fn beta_route_pdf<T: Real>(d: &BKw<T>, t: T) -> Result<T> {
    let c = beta_coeffs(d.m(), d.n())?;
    let tm = d.terms(t);
    let f = log_kw_pdf(&tm, d.a(), d.b()).exp();
    Ok(f * c
        .values
        .iter()
        .enumerate()
        .map(|(j, &w)| w * mul_log(T::of(j) + d.n() - T::one(), tm.log_xb).exp())
        .fold(T::zero(), |a, b| a + b))
}

/// `f(t) Σ_l η_l F^l`.
pub fn eta_route_pdf<T: Real>(d: &BKw<T>, t: T) -> Result<T> {
    let c = eta_coeffs(d.m(), d.n())?;
    let tm = d.terms(t);
    let f = log_kw_pdf(&tm, d.a(), d.b()).exp();
    Ok(f * horner(&c.values, tm.log_w.exp()))
}

/// `Σ_k μ_k F^k` with the cut given by `k_max` for non-integer `n`.
pub fn mu_route_cdf<T: Real>(d: &BKw<T>, t: T, k_max: usize) -> Result<T> {
    let c = mu_coeffs(d.m(), d.n(), k_max)?;
    Ok(c.eval_power(d.terms(t).log_w.exp()))
}

/// `Σ λ_{p,q} F^{p+q}`.
pub fn lambda_route_cdf<T: Real>(d: &BKw<T>, t: T) -> Result<T> {
    let c = lambda_pq_coeffs(d.m(), d.n())?;
    Ok(c.eval_power(d.terms(t).log_w.exp()))
}

fn kw_parent<T: Real>(d: &BKw<T>) -> Result<BKw<T>> {
    BKw::kumaraswamy(d.a(), d.b(), d.baseline().clone())
}

/// Upper-tail power index estimated from deep quantiles, or `None` when the
/// tail decays faster than any power.
fn tail_power<T: Real>(d: &BKw<T>) -> Result<Option<T>> {
    let ps = [T::lit(1e-6), T::lit(1e-8), T::lit(1e-10)];
    let mut ts = [T::zero(); 3];
    for (slot, &q) in ts.iter_mut().zip(ps.iter()) {
        *slot = d.quantile_upper(q)?;
    }
    if !ts[2].is_finite() {
        return Ok(Some(T::zero()));
    }
    if !(ts[0] > T::zero()) || !(ts[2] > ts[1]) {
        return Ok(None);
    }
    let step = T::lit(100.0).ln();
    let p1 = step / (ts[1] / ts[0]).ln();
    let p2 = step / (ts[2] / ts[1]).ln();
    // a power-law tail keeps the same local index, lighter tails steepen
    if p2 > T::lit(1.15) * p1 {
        Ok(None)
    } else {
        Ok(Some(p2))
    }
}

fn moment_exists<T: Real>(d: &BKw<T>, p: T, weight: T) -> Result<()> {
    if p == T::zero() {
        return Ok(());
    }
    if let Some(alpha) = tail_power(d)? {
        if p >= T::lit(0.95) * alpha * weight {
            return Err(Error::NonConvergentIntegral(format!(
                "moment of order {p} needs a tail index above {}, estimated {}",
                p / weight,
                alpha
            )));
        }
    }
    Ok(())
}

/// Probability weighted moment of the Kumaraswamy-G(a, b) parent of `d`:
///
/// ```text
/// Γ_{p,q,r} = ∫ t^p F^q S^r f dt = ∫_0^1 Q(u)^p u^q (1 - u)^r du
/// ```
///
/// `r > -1` so the `β` route can use `r = n - 1` for `n < 1`.
pub fn pwm<T: Real>(d: &BKw<T>, p: u32, q: u32, r: T, cfg: &QuadConfig<T>) -> Result<T> {
    if !(r > -T::one()) {
        return domain(format!("pwm weight r must exceed -1, got {r}"));
    }
    let kw = kw_parent(d)?;
    moment_exists(&kw, T::of(p as usize), r + T::one())?;
    let q = integrate_unit(
        |u, v| match kw.quantile_pair(u, v) {
            Ok(t) => mul_log(T::of(p as usize), t.ln()).exp() * u.powi(q as i32) * mul_log(r, v.ln()).exp(),
            Err(_) => T::nan(),
        },
        cfg,
    )?;
    Ok(q.value)
}

/// The same integral taken over the support in `t`.
pub fn pwm_by_support<T: Real>(d: &BKw<T>, p: u32, q: u32, r: T, cfg: &QuadConfig<T>) -> Result<T> {
    if !(r > -T::one()) {
        return domain(format!("pwm weight r must exceed -1, got {r}"));
    }
    let kw = kw_parent(d)?;
    moment_exists(&kw, T::of(p as usize), r + T::one())?;
    let (pp, qq) = (T::of(p as usize), T::of(q as usize));
    let quad = kw.integrate_support(
        |t| {
            let tm = kw.terms(t);
            (mul_log(pp, t.ln()) + mul_log(qq, tm.log_w) + mul_log(r, tm.log_xb) + log_kw_pdf(&tm, kw.a(), kw.b()))
                .exp()
        },
        cfg,
    )?;
    Ok(quad.value)
}

/// `E[T^s]` by quadrature.
pub fn moment_by_quadrature<T: Real>(d: &BKw<T>, s: u32, cfg: &QuadConfig<T>) -> Result<T> {
    moment_exists(d, T::of(s as usize), T::one())?;
    let si = s as i32;
    Ok(d.expect(|t| t.powi(si), cfg)?.value)
}

/// `E[T^s] = Σ_j β_j Γ_{s,0,j+n-1}` (integer `m`), cross-checked against
/// `Σ_l η_l Γ_{s,l,0}` when `n` is also an integer and against quadrature.
pub fn moment<T: Real>(d: &BKw<T>, s: u32, cfg: &QuadConfig<T>) -> Result<CrossCheck<T>> {
    let beta = beta_coeffs(d.m(), d.n())?;
    let mut series = T::zero();
    for (j, &w) in beta.values.iter().enumerate() {
        series += w * pwm(d, s, 0, T::of(j) + d.n() - T::one(), cfg)?;
    }
    let alternate = match eta_coeffs(d.m(), d.n()) {
        Ok(eta) => {
            let mut v = T::zero();
            for (l, &w) in eta.values.iter().enumerate() {
                v += w * pwm(d, s, l as u32, T::zero(), cfg)?;
            }
            Some(v)
        }
        Err(Error::UnsupportedExpansion(_)) => None,
        Err(e) => return Err(e),
    };
    let quadrature = moment_by_quadrature(d, s, cfg)?;
    Ok(CrossCheck {
        value: series,
        series: Some(series),
        alternate,
        quadrature,
    })
}

/// Order-statistic density `f(t) Σ_z χ_z S^z`.
pub fn order_stat_pdf<T: Real>(d: &BKw<T>, r: usize, size: usize, t: T, k_max: usize) -> Result<T> {
    let chi = chi_coeffs(d.m(), d.n(), r, size, k_max)?;
    if t <= d.support_low() {
        return d.order_statistic_pdf(r, size, t);
    }
    let tm = d.terms(t);
    let f = log_kw_pdf(&tm, d.a(), d.b()).exp();
    Ok(f * horner(&chi.values, tm.log_xb.exp()))
}

/// `E[T_{r:size}^s] = Σ_z χ_z Γ_{s,0,z}`.
pub fn order_stat_moment<T: Real>(
    d: &BKw<T>,
    r: usize,
    size: usize,
    s: u32,
    k_max: usize,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    let chi = chi_coeffs(d.m(), d.n(), r, size, k_max)?;
    let mut v = T::zero();
    for (z, &c) in chi.values.iter().enumerate() {
        if c != T::zero() {
            v += c * pwm(d, s, 0, T::of(z), cfg)?;
        }
    }
    Ok(v)
}

fn ensure_exponential_moment<T: Real>(d: &BKw<T>, s: T) -> Result<()> {
    if s <= T::zero() {
        return Ok(());
    }
    let rate = d.tail_rates()?.exponential;
    if s >= rate {
        return Err(Error::NonConvergentIntegral(format!(
            "mgf argument {s} at or above the tail decay rate {rate}"
        )));
    }
    Ok(())
}

/// `M(s) = E[e^{sT}]` by quadrature, with the mixture route
/// `Σ_j β'_j M_Kw(s; a, b (j + n))` for integer `m`.
pub fn mgf<T: Real>(d: &BKw<T>, s: T, cfg: &QuadConfig<T>) -> Result<CrossCheck<T>> {
    ensure_exponential_moment(d, s)?;
    let quadrature = d.expect(|t| (s * t).exp(), cfg)?.value;
    let series = match beta_prime_coeffs(d.m(), d.n()) {
        Ok(c) => {
            let mut v = T::zero();
            for (j, &w) in c.values.iter().enumerate() {
                let kw = BKw::kumaraswamy(d.a(), d.b() * (T::of(j) + d.n()), d.baseline().clone())?;
                v += w * kw.expect(|t| (s * t).exp(), cfg)?.value;
            }
            Some(v)
        }
        Err(Error::UnsupportedExpansion(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CrossCheck {
        value: quadrature,
        series,
        alternate: None,
        quadrature,
    })
}

/// Rényi entropy `ln(∫ f^δ dt) / (1 - δ)`.
///
/// When `(m - 1) δ` is a non-negative integer `K` the integral is also
/// expanded as `Σ_α R_α J_α` with `R_α = C(K, α) (-1)^α / B(m, n)^δ` and
/// `J_α = ∫ (a b g G^{a-1} X^{b n - 1})^δ X^{b α} dt`.
pub fn renyi_entropy<T: Real>(d: &BKw<T>, delta: T, cfg: &QuadConfig<T>) -> Result<CrossCheck<T>> {
    if !(delta > T::zero()) || delta == T::one() {
        return domain(format!("Rényi order must be positive and not 1, got {delta}"));
    }
    let scale = T::one() / (T::one() - delta);
    let total = d.integrate_support(|t| (delta * d.log_pdf(t)).exp(), cfg)?.value;
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::NonConvergentIntegral(format!(
            "integral of f^{delta} is {total}"
        )));
    }
    let quadrature = scale * total.ln();
    let k = (d.m() - T::one()) * delta;
    let series = if k >= T::zero() && k.fract() == T::zero() && k <= T::lit(1e4) {
        let kk = k.to_usize().unwrap_or(0);
        let lb = d.log_beta();
        let (a, b, n) = (d.a(), d.b(), d.n());
        let one = T::one();
        let mut v = T::zero();
        for alpha in 0..=kk {
            let al = T::of(alpha);
            let j = d
                .integrate_support(
                    |t| {
                        let tm = d.terms(t);
                        let base = a.ln() + b.ln() + tm.log_g + mul_log(a - one, tm.log_cdf)
                            + mul_log(b * n - one, tm.log_x);
                        (delta * base + mul_log(al, tm.log_xb)).exp()
                    },
                    cfg,
                )?
                .value;
            v += binom(k, alpha) * sign::<T>(alpha) * (-delta * lb).exp() * j;
        }
        Some(scale * v.ln())
    } else {
        None
    };
    Ok(CrossCheck {
        value: quadrature,
        series,
        alternate: None,
        quadrature,
    })
}
