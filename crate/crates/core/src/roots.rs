//! Scalar root finding and 1-D maximization.

use crate::error::{Error, Result};

/// Stopping rule for bracketed root finding.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute residual accepted as a root.
    pub ftol: f64,
    /// Bracket width at which iteration stops.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            ftol: 1e-14,
            xtol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Combines inverse quadratic interpolation and secant steps with a bisection
/// fallback, so convergence is never slower than bisection. `fa` and `fb` must
/// already be known and of opposite sign (or one of them zero).
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: Tolerance,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotConverged {
            op: "brent",
            detail: format!("no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}"),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.xtol;
        let xm = 0.5 * (c - b);
        if fb.abs() <= tol.ftol || xm.abs() <= tol1 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::NotConverged {
        op: "brent",
        detail: format!("{} iterations, residual {fb:e}", tol.max_iter),
    })
}

/// Finds every sign change of `f` over the sample points `xs` and polishes each.
///
/// Exact zeros at sample points are reported once. Roots closer together than
/// the sample spacing can be missed; that is the price of a scan.
pub fn scan_roots<F: FnMut(f64) -> f64>(mut f: F, xs: &[f64], tol: Tolerance) -> Vec<f64> {
    let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        let (fa, fb) = (values[i], values[i + 1]);
        if !(fa.is_finite() && fb.is_finite()) {
            continue;
        }
        if fa == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            if let Ok(r) = brent(&mut f, xs[i], xs[i + 1], fa, fb, tol) {
                roots.push(r);
            }
        }
    }
    if let (Some(&x), Some(&v)) = (xs.last(), values.last()) {
        if v == 0.0 {
            roots.push(x);
        }
    }
    roots
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the minimum, returning the argmin and value.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let x = golden_max(|t| -f(t), a, b, xtol);
    (x, f(x))
}
