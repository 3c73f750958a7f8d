//! Box-constrained minimizers used by the fitting code: projected BFGS, a
//! damped Newton polish on a finite-difference Hessian, and Nelder-Mead.
//!
//! Every coordinate shares the same box `[lo, hi]`.

use crate::linalg::Matrix;
use crate::real::Real;

#[derive(Debug, Clone)]
pub(crate) struct Minimum<T> {
    pub x: Vec<T>,
    pub f: T,
    pub g: Vec<T>,
    pub iterations: usize,
}

fn clamp<T: Real>(x: &mut [T], lo: T, hi: T) {
    for v in x.iter_mut() {
        *v = v.max(lo).min(hi);
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

fn inf_norm<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Gradient with the components that push against an active bound removed.
pub(crate) fn projected<T: Real>(x: &[T], g: &[T], lo: T, hi: T) -> Vec<T> {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if (xi <= lo && gi > T::zero()) || (xi >= hi && gi < T::zero()) {
                T::zero()
            } else {
                gi
            }
        })
        .collect()
}

/// Projected BFGS with Armijo backtracking. `fg` returns `(f, ∇f)`; a
/// non-finite `f` marks an infeasible point and shortens the step.
pub(crate) fn bfgs<T: Real, F: FnMut(&[T]) -> (T, Vec<T>)>(
    mut fg: F,
    x0: &[T],
    lo: T,
    hi: T,
    max_iter: usize,
    gtol: T,
) -> Option<Minimum<T>> {
    let k = x0.len();
    let mut x = x0.to_vec();
    clamp(&mut x, lo, hi);
    let (mut f, mut g) = fg(&x);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut h = Matrix::identity(k);
    let mut fresh = true;
    let max_step = T::lit(2.0);
    let mut stalls = 0;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let pg = projected(&x, &g, lo, hi);
        if inf_norm(&pg) <= gtol {
            break;
        }
        let mut d: Vec<T> = h.mul_vec(&g).into_iter().map(|v| -v).collect();
        for i in 0..k {
            if (x[i] <= lo && d[i] < T::zero()) || (x[i] >= hi && d[i] > T::zero()) {
                d[i] = T::zero();
            }
        }
        if !(dot(&d, &pg) < T::zero()) {
            h = Matrix::identity(k);
            fresh = true;
            d = pg.iter().map(|v| -*v).collect();
        }
        let dn = inf_norm(&d);
        let mut alpha = if dn > max_step { max_step / dn } else { T::one() };
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<T> = x.iter().zip(&d).map(|(a, b)| *a + alpha * *b).collect();
            clamp(&mut xn, lo, hi);
            let step: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
            let (fnew, gnew) = fg(&xn);
            if fnew.is_finite()
                && gnew.iter().all(|v| v.is_finite())
                && fnew <= f + T::lit(1e-4) * dot(&g, &step)
            {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            alpha *= T::lit(0.5);
        }
        let (xn, fnew, gnew) = match accepted {
            Some(v) => v,
            None if !fresh => {
                h = Matrix::identity(k);
                fresh = true;
                continue;
            }
            None => break,
        };
        let s: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = gnew.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        let yy = dot(&y, &y);
        if sy > T::lit(1e-12) * dot(&s, &s).sqrt() * yy.sqrt() {
            if fresh {
                h = Matrix::from_fn(k, |i, j| if i == j { sy / yy } else { T::zero() });
                fresh = false;
            }
            let rho = sy.recip();
            let hy = h.mul_vec(&y);
            let yhy = dot(&y, &hy);
            h = Matrix::from_fn(k, |i, j| {
                h.get(i, j) - rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j]
            });
        }
        let df = (f - fnew).abs();
        if df <= T::lit(1e-15) * (T::one() + f.abs()) {
            stalls += 1;
            if stalls >= 4 {
                x = xn;
                f = fnew;
                g = gnew;
                break;
            }
        } else {
            stalls = 0;
        }
        x = xn;
        f = fnew;
        g = gnew;
    }
    Some(Minimum {
        x,
        f,
        g,
        iterations: it,
    })
}

/// Central-difference Hessian of `fg`'s gradient, symmetrized.
pub(crate) fn fd_hessian<T: Real, F: FnMut(&[T]) -> (T, Vec<T>)>(fg: &mut F, x: &[T]) -> Option<Matrix<T>> {
    let k = x.len();
    let mut h = Matrix::zeros(k);
    let cb = T::epsilon().cbrt();
    for i in 0..k {
        let step = cb * x[i].abs().max(T::one());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += step;
        xm[i] -= step;
        let (fp, gp) = fg(&xp);
        let (fm, gm) = fg(&xm);
        if !fp.is_finite() || !fm.is_finite() {
            return None;
        }
        for j in 0..k {
            h.set(j, i, (gp[j] - gm[j]) / (step + step));
        }
    }
    Some(h.symmetrized())
}

/// Levenberg-damped Newton steps until the projected gradient falls below
/// `gtol` or no step improves.
pub(crate) fn newton_polish<T: Real, F: FnMut(&[T]) -> (T, Vec<T>)>(
    mut fg: F,
    start: Minimum<T>,
    lo: T,
    hi: T,
    max_iter: usize,
    gtol: T,
) -> Minimum<T> {
    let mut cur = start;
    let k = cur.x.len();
    for _ in 0..max_iter {
        let pg = projected(&cur.x, &cur.g, lo, hi);
        if inf_norm(&pg) <= gtol {
            break;
        }
        let h = match fd_hessian(&mut fg, &cur.x) {
            Some(h) => h,
            None => break,
        };
        let diag_scale = h.diagonal().iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::lit(1e-12));
        let mut mu = T::zero();
        let mut improved = false;
        for _ in 0..12 {
            let damped = Matrix::from_fn(k, |i, j| h.get(i, j) + if i == j { mu } else { T::zero() });
            let step = match damped.solve(&cur.g) {
                Ok(v) => v,
                Err(_) => {
                    mu = (mu * T::lit(10.0)).max(T::lit(1e-8) * diag_scale);
                    continue;
                }
            };
            let mut xn: Vec<T> = cur.x.iter().zip(&step).map(|(a, b)| *a - *b).collect();
            clamp(&mut xn, lo, hi);
            let (fnew, gnew) = fg(&xn);
            let better = fnew.is_finite()
                && (fnew < cur.f
                    || (fnew <= cur.f + T::lit(1e-12) * (T::one() + cur.f.abs())
                        && inf_norm(&projected(&xn, &gnew, lo, hi)) < inf_norm(&pg)));
            if better {
                cur = Minimum {
                    x: xn,
                    f: fnew,
                    g: gnew,
                    iterations: cur.iterations + 1,
                };
                improved = true;
                break;
            }
            mu = (mu * T::lit(10.0)).max(T::lit(1e-8) * diag_scale);
        }
        if !improved {
            break;
        }
    }
    cur
}

/// Nelder-Mead simplex search, clamped to the box.
pub(crate) fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    step: T,
    lo: T,
    hi: T,
    max_iter: usize,
    ftol: T,
) -> Option<(Vec<T>, T)> {
    let k = x0.len();
    let eval = |f: &mut F, mut x: Vec<T>| {
        clamp(&mut x, lo, hi);
        let v = f(&x);
        (x, if v.is_finite() { v } else { T::infinity() })
    };
    let mut simplex = vec![eval(&mut f, x0.to_vec())];
    for i in 0..k {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(eval(&mut f, x));
    }
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (best, worst) = (simplex[0].1, simplex[k].1);
        if best.is_finite() && (worst - best).abs() <= ftol * (T::one() + best.abs()) {
            break;
        }
        let mut centroid = vec![T::zero(); k];
        for (x, _) in simplex.iter().take(k) {
            for j in 0..k {
                centroid[j] += x[j] / T::of(k);
            }
        }
        let towards = |c: &[T], x: &[T], t: T| -> Vec<T> { c.iter().zip(x).map(|(a, b)| *a + t * (*b - *a)).collect() };
        let refl = eval(&mut f, towards(&centroid, &simplex[k].0, -alpha));
        if refl.1 < simplex[0].1 {
            let exp = eval(&mut f, towards(&centroid, &simplex[k].0, -gamma));
            simplex[k] = if exp.1 < refl.1 { exp } else { refl };
        } else if refl.1 < simplex[k - 1].1 {
            simplex[k] = refl;
        } else {
            let con = if refl.1 < simplex[k].1 {
                eval(&mut f, towards(&centroid, &refl.0, rho))
            } else {
                eval(&mut f, towards(&centroid, &simplex[k].0, rho))
            };
            if con.1 < simplex[k].1.min(refl.1) {
                simplex[k] = con;
            } else {
                let x0 = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x = towards(&x0, &item.0, sigma);
                    *item = eval(&mut f, x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (x, v) = simplex.swap_remove(0);
    if v.is_finite() {
        Some((x, v))
    } else {
        None
    }
}
