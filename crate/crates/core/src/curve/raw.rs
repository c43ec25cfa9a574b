//! Raw (not arc-length) parameterizations of the built-in curve kinds.

use std::f64::consts::{PI, TAU};
use std::fmt::Debug;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::spec::{CurveKind, CurveSpec, FourierMode};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, gl10};
use crate::util::{gcd, quarter_shift, rationalize, wrap};

/// A periodic parameterization `t ↦ γ(t)` with derivatives up to order 4.
pub(crate) trait RawCurve: Send + Sync + Debug {
    fn period(&self) -> f64;

    /// Derivatives of orders `0..=order` with respect to the raw parameter.
    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>>;

    /// `γ'(t)`; cheaper than `eval` for kinds whose position needs quadrature.
    fn velocity(&self, t: f64) -> DVector<f64> {
        self.eval(t, 1).swap_remove(1)
    }

    /// `|γ'(t)|`.
    fn speed(&self, t: f64) -> f64 {
        self.velocity(t).norm()
    }

    /// Constant raw speed, when the kind guarantees one.
    fn constant_speed(&self) -> Option<f64> {
        None
    }
}

pub(crate) fn build_raw(spec: &CurveSpec, resolution: usize) -> Result<Box<dyn RawCurve>> {
    let n = spec.dim();
    let base: Box<dyn RawCurve> = match &spec.kind {
        CurveKind::Circle { radius } => Box::new(Ellipse { a: *radius, b: *radius, dim: n }),
        CurveKind::PlanarEllipse { a, b } => Box::new(Ellipse { a: *a, b: *b, dim: n }),
        CurveKind::FourierConvex { radius, cos, sin } => {
            Box::new(FourierConvex::new(*radius, cos.clone(), sin.clone(), n)?)
        }
        CurveKind::Coil { epsilon, m } => Box::new(Coil { epsilon: *epsilon, m: *m as f64, dim: n }),
        CurveKind::SubgroupOrbit { matrix, seed_point, period } => {
            Box::new(SubgroupOrbit::new(matrix, seed_point, *period)?)
        }
        CurveKind::FlatPoint { scale } => Box::new(FlatPoint::new(*scale, n, resolution)),
        CurveKind::OrthogonalCircles { half_width } => {
            Box::new(OrthogonalCircles { half_width: *half_width, dim: n })
        }
        CurveKind::RawSamples { points } => Box::new(TrigSamples::new(points)?),
    };
    if spec.perturbation.is_empty() {
        Ok(base)
    } else {
        Ok(Box::new(Perturbed::new(base, &spec.perturbation, n)))
    }
}

fn planar(dim: usize, x: f64, y: f64) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[0] = x;
    v[1] = y;
    v
}

#[derive(Debug)]
struct Ellipse {
    a: f64,
    b: f64,
    dim: usize,
}

impl RawCurve for Ellipse {
    fn period(&self) -> f64 {
        TAU
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        let (s, c) = t.sin_cos();
        (0..=order)
            .map(|j| {
                let (cj, sj) = quarter_shift(c, s, j);
                planar(self.dim, self.a * cj, self.b * sj)
            })
            .collect()
    }

    fn speed(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (self.a * s).hypot(self.b * c)
    }

    fn constant_speed(&self) -> Option<f64> {
        (self.a == self.b).then_some(self.a)
    }
}

/// Convex curve given by its support function; `γ'(θ) = ρ(θ)·e'(θ)` with `ρ = h + h''`.
#[derive(Debug)]
struct FourierConvex {
    radius: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    dim: usize,
}

impl FourierConvex {
    fn new(radius: f64, cos: Vec<f64>, sin: Vec<f64>, dim: usize) -> Result<Self> {
        let curve = Self { radius, cos, sin, dim };
        let samples = 4096;
        for i in 0..samples {
            let t = TAU * i as f64 / samples as f64;
            let rho = curve.support(t, 0) + curve.support(t, 2);
            if rho <= 1e-9 * radius {
                let field = if curve.cos.iter().any(|c| *c != 0.0) { "cos" } else { "sin" };
                return Err(Error::Degenerate {
                    parameter: field.into(),
                    reason: format!("radius of curvature h + h'' = {rho:e} at θ = {t:.6}; curve is not strictly convex"),
                });
            }
        }
        Ok(curve)
    }

    /// j-th derivative of the support function.
    fn support(&self, t: f64, j: usize) -> f64 {
        let mut acc = if j == 0 { self.radius } else { 0.0 };
        let modes = self.cos.len().max(self.sin.len());
        for idx in 0..modes {
            let k = (idx + 1) as f64;
            let (s, c) = (k * t).sin_cos();
            let (cj, sj) = quarter_shift(c, s, j);
            let kj = k.powi(j as i32);
            acc += kj * (self.cos.get(idx).copied().unwrap_or(0.0) * cj + self.sin.get(idx).copied().unwrap_or(0.0) * sj);
        }
        acc
    }

    fn rho(&self, t: f64, j: usize) -> f64 {
        self.support(t, j) + self.support(t, j + 2)
    }
}

impl RawCurve for FourierConvex {
    fn period(&self) -> f64 {
        TAU
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        let (s, c) = t.sin_cos();
        let e = planar(self.dim, c, s);
        let ep = planar(self.dim, -s, c);
        let mut out = vec![&e * self.support(t, 0) + &ep * self.support(t, 1)];
        let r: Vec<f64> = (0..order).map(|j| self.rho(t, j)).collect();
        if order >= 1 {
            out.push(&ep * r[0]);
        }
        if order >= 2 {
            out.push(&ep * r[1] - &e * r[0]);
        }
        if order >= 3 {
            out.push(&ep * (r[2] - r[0]) - &e * (2.0 * r[1]));
        }
        if order >= 4 {
            out.push(&ep * (r[3] - 3.0 * r[1]) + &e * (r[0] - 3.0 * r[2]));
        }
        out
    }

    fn speed(&self, t: f64) -> f64 {
        self.rho(t, 0)
    }

    fn constant_speed(&self) -> Option<f64> {
        let flat = self.cos.iter().chain(&self.sin).all(|c| *c == 0.0);
        flat.then_some(self.radius)
    }
}

#[derive(Debug)]
struct Coil {
    epsilon: f64,
    m: f64,
    dim: usize,
}

impl RawCurve for Coil {
    fn period(&self) -> f64 {
        TAU
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        let (s1, c1) = t.sin_cos();
        let (sm, cm) = (self.m * t).sin_cos();
        (0..=order)
            .map(|j| {
                let (a, b) = quarter_shift(c1, s1, j);
                let (cj, sj) = quarter_shift(cm, sm, j);
                let scale = self.epsilon * self.m.powi(j as i32);
                let mut v = DVector::zeros(self.dim);
                v[0] = a;
                v[1] = b;
                v[2] = scale * cj;
                v[3] = scale * sj;
                v
            })
            .collect()
    }

    fn constant_speed(&self) -> Option<f64> {
        Some((1.0 + (self.epsilon * self.m).powi(2)).sqrt())
    }
}

/// `exp(At)p₀` written as a sum of rotations in the invariant 2-planes of `A`.
#[derive(Debug)]
struct SubgroupOrbit {
    center: DVector<f64>,
    /// `(ω, u, w)` with `exp(At)(u) = cos(ωt)u + sin(ωt)w`.
    rotations: Vec<(f64, DVector<f64>, DVector<f64>)>,
    period: f64,
    speed: f64,
}

impl SubgroupOrbit {
    fn new(matrix: &[Vec<f64>], seed: &[f64], period: Option<f64>) -> Result<Self> {
        let n = matrix.len();
        let a = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
        let p0 = DVector::from_column_slice(seed);
        let scale = a.amax().max(f64::MIN_POSITIVE);
        let eig = SymmetricEigen::new(-(&a * &a));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

        let cluster_tol = 1e-8 * scale * scale;
        let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
        for &i in &order {
            let lam = eig.eigenvalues[i].max(0.0);
            match clusters.last_mut() {
                Some((rep, members)) if (lam - *rep).abs() <= cluster_tol => members.push(i),
                _ => clusters.push((lam, vec![i])),
            }
        }

        let p_norm = p0.norm();
        let mut center = DVector::zeros(n);
        let mut rotations = Vec::new();
        for (lam, members) in clusters {
            let mut u = DVector::zeros(n);
            for &i in &members {
                let v = eig.eigenvectors.column(i);
                u += v * v.dot(&p0);
            }
            if u.norm() <= 1e-12 * p_norm.max(1.0) {
                continue;
            }
            if lam <= cluster_tol {
                center += u;
            } else {
                let omega = lam.sqrt();
                let w = &a * &u / omega;
                rotations.push((omega, u, w));
            }
        }
        if rotations.is_empty() {
            return Err(Error::Degenerate {
                parameter: "seed_point".into(),
                reason: "seed point is fixed by the subgroup; the orbit is a single point".into(),
            });
        }
        let speed = (&a * &p0).norm();

        let mut curve = Self { center, rotations, period: 0.0, speed };
        curve.period = match period {
            Some(t) => t,
            None => curve.detect_period()?,
        };
        let closure = (curve.position(curve.period) - &p0).norm();
        if closure > 1e-9 * p_norm.max(1.0) {
            return Err(Error::Degenerate {
                parameter: "period".into(),
                reason: format!("orbit does not close after t = {}: gap {closure:e}", curve.period),
            });
        }
        Ok(curve)
    }

    fn detect_period(&self) -> Result<f64> {
        let w_min = self.rotations.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let mut ratios = Vec::new();
        for (omega, _, _) in &self.rotations {
            let (p, q) = rationalize(omega / w_min, 1000, 1e-9 * omega / w_min).ok_or_else(|| Error::Degenerate {
                parameter: "matrix".into(),
                reason: format!("rotation frequencies {w_min} and {omega} are incommensurate; the orbit is not closed"),
            })?;
            ratios.push((p as u64, q));
        }
        let l = ratios.iter().fold(1u64, |acc, &(_, q)| acc / gcd(acc, q) * q);
        let g = ratios.iter().fold(0u64, |acc, &(p, q)| gcd(acc, p * (l / q)));
        Ok(TAU * l as f64 / (w_min * g as f64))
    }

    fn position(&self, t: f64) -> DVector<f64> {
        self.derivative(t, 0)
    }

    fn derivative(&self, t: f64, j: usize) -> DVector<f64> {
        let mut v = if j == 0 { self.center.clone() } else { DVector::zeros(self.center.len()) };
        for (omega, u, w) in &self.rotations {
            let (s, c) = (omega * t).sin_cos();
            let (cj, sj) = quarter_shift(c, s, j);
            let k = omega.powi(j as i32);
            v += u * (k * cj) + w * (k * sj);
        }
        v
    }
}

impl RawCurve for SubgroupOrbit {
    fn period(&self) -> f64 {
        self.period
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        (0..=order).map(|j| self.derivative(t, j)).collect()
    }

    fn constant_speed(&self) -> Option<f64> {
        Some(self.speed)
    }
}

/// Unit-speed planar curve with turning angle `θ(s) = s − sin(2s)/2`.
///
/// The angle satisfies `θ(s + π) = θ(s) + π`, so the two halves cancel and the
/// curve closes exactly after s = 2π. Positions come from tabulated quadrature of
/// the unit tangent.
#[derive(Debug)]
struct FlatPoint {
    scale: f64,
    dim: usize,
    step: f64,
    nodes: Vec<[f64; 2]>,
}

impl FlatPoint {
    fn new(scale: f64, dim: usize, resolution: usize) -> Self {
        let step = TAU / resolution as f64;
        let mut nodes = Vec::with_capacity(resolution + 1);
        let mut p = [0.0, 0.0];
        nodes.push(p);
        for i in 0..resolution {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            p[0] += adaptive(|s| Self::theta(s).cos(), a, b, 1e-15, 1.0);
            p[1] += adaptive(|s| Self::theta(s).sin(), a, b, 1e-15, 1.0);
            nodes.push(p);
        }
        Self { scale, dim, step, nodes }
    }

    fn theta(s: f64) -> f64 {
        s - 0.5 * (2.0 * s).sin()
    }

    fn unit_position(&self, s: f64) -> [f64; 2] {
        let s = wrap(s, TAU);
        let i = ((s / self.step) as usize).min(self.nodes.len() - 2);
        let a = i as f64 * self.step;
        let rule = gl10();
        let dx = rule.integrate(a, s, |u| Self::theta(u).cos());
        let dy = rule.integrate(a, s, |u| Self::theta(u).sin());
        [self.nodes[i][0] + dx, self.nodes[i][1] + dy]
    }
}

impl RawCurve for FlatPoint {
    fn period(&self) -> f64 {
        TAU
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        let p = self.unit_position(t);
        let mut out = vec![planar(self.dim, self.scale * p[0], self.scale * p[1])];
        let th = Self::theta(t);
        let (s2, c2) = (2.0 * t).sin_cos();
        let (d1, d2, d3) = (1.0 - c2, 2.0 * s2, 4.0 * c2);
        let (sn, cs) = th.sin_cos();
        // tangent E = (cos θ, sin θ), normal E⊥ = (−sin θ, cos θ)
        let combo = |along: f64, across: f64| {
            planar(self.dim, self.scale * (along * cs - across * sn), self.scale * (along * sn + across * cs))
        };
        if order >= 1 {
            out.push(combo(1.0, 0.0));
        }
        if order >= 2 {
            out.push(combo(0.0, d1));
        }
        if order >= 3 {
            out.push(combo(-d1 * d1, d2));
        }
        if order >= 4 {
            out.push(combo(-3.0 * d1 * d2, d3 - d1 * d1 * d1));
        }
        out
    }

    fn velocity(&self, t: f64) -> DVector<f64> {
        let (s, c) = Self::theta(t).sin_cos();
        planar(self.dim, self.scale * c, self.scale * s)
    }

    fn speed(&self, _t: f64) -> f64 {
        self.scale
    }

    fn constant_speed(&self) -> Option<f64> {
        Some(self.scale)
    }
}

/// Degree-9 smoothstep: rises from 0 to 1 on [0, 1] with four vanishing derivatives at both ends.
const SMOOTHSTEP: [f64; 10] = [0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0];

fn poly_derivative(coeffs: &[f64], x: f64, j: usize) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if k < j {
            break;
        }
        let falling: f64 = (0..j).map(|i| (k - i) as f64).product();
        acc += c * falling * x.powi((k - j) as i32);
    }
    acc
}

#[derive(Debug)]
struct OrthogonalCircles {
    half_width: f64,
    dim: usize,
}

impl OrthogonalCircles {
    /// Weight of the first circle and its derivatives in u.
    fn weight(&self, u: f64) -> [f64; 5] {
        let u = wrap(u + PI, TAU) - PI;
        let a = self.half_width;
        let span = PI - 2.0 * a;
        let d = u.abs();
        if d <= a {
            return [1.0, 0.0, 0.0, 0.0, 0.0];
        }
        if d >= PI - a {
            return [0.0; 5];
        }
        let s = (d - a) / span;
        let sign = u.signum();
        let mut w = [0.0; 5];
        for (j, wj) in w.iter_mut().enumerate() {
            let chain = (sign / span).powi(j as i32);
            *wj = -poly_derivative(&SMOOTHSTEP, s, j) * chain;
        }
        w[0] += 1.0;
        w
    }
}

impl RawCurve for OrthogonalCircles {
    fn period(&self) -> f64 {
        TAU
    }

    fn eval(&self, u: f64, order: usize) -> Vec<DVector<f64>> {
        let w = self.weight(u);
        let (s, c) = u.sin_cos();
        let circle = |j: usize| {
            let (cj, sj) = quarter_shift(c, s, j);
            let mut first = DVector::zeros(self.dim);
            first[0] = cj;
            first[1] = sj;
            let mut second = DVector::zeros(self.dim);
            second[2] = -cj;
            second[3] = -sj;
            (first, second)
        };
        let binom = |n: usize, k: usize| -> f64 { (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product() };
        (0..=order)
            .map(|j| {
                // γ⁽ʲ⁾ = c₂⁽ʲ⁾ + Σᵢ C(j,i) w⁽ⁱ⁾ (c₁ − c₂)⁽ʲ⁻ⁱ⁾
                let mut v = circle(j).1;
                for i in 0..=j {
                    if w[i] != 0.0 {
                        let (c1, c2) = circle(j - i);
                        v += (c1 - c2) * (binom(j, i) * w[i]);
                    }
                }
                v
            })
            .collect()
    }
}

/// Trigonometric interpolant through equally spaced closed samples.
#[derive(Debug)]
struct TrigSamples {
    /// Constant term followed by `(a_k, b_k)` for k = 1..=K.
    mean: DVector<f64>,
    modes: Vec<(DVector<f64>, DVector<f64>)>,
}

impl TrigSamples {
    fn new(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        let dim = points[0].len();
        let pts: Vec<DVector<f64>> = points.iter().map(|p| DVector::from_column_slice(p)).collect();
        check_polygon(&pts)?;
        let mut mean = DVector::zeros(dim);
        for p in &pts {
            mean += p;
        }
        mean /= n as f64;
        let mut modes = Vec::new();
        for k in 1..=n / 2 {
            let mut a = DVector::zeros(dim);
            let mut b = DVector::zeros(dim);
            for (j, p) in pts.iter().enumerate() {
                let (s, c) = (TAU * (k * j % n) as f64 / n as f64).sin_cos();
                a += p * c;
                b += p * s;
            }
            let weight = if 2 * k == n { 1.0 / n as f64 } else { 2.0 / n as f64 };
            modes.push((a * weight, b * weight));
        }
        Ok(Self { mean, modes })
    }
}

fn check_polygon(pts: &[DVector<f64>]) -> Result<()> {
    let n = pts.len();
    let mut perimeter = 0.0;
    for i in 0..n {
        let seg = (&pts[(i + 1) % n] - &pts[i]).norm();
        if seg == 0.0 {
            return Err(Error::Degenerate {
                parameter: format!("points[{}]", (i + 1) % n),
                reason: "repeats the previous sample".into(),
            });
        }
        perimeter += seg;
    }
    let floor = 1e-9 * perimeter;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let d = segment_distance(&pts[i], &pts[(i + 1) % n], &pts[j], &pts[(j + 1) % n]);
            if d < floor {
                return Err(Error::Degenerate {
                    parameter: "points".into(),
                    reason: format!("sample polygon self-intersects between segments {i} and {j}"),
                });
            }
        }
    }
    Ok(())
}

/// Distance between segments [p0, p1] and [q0, q1] in any dimension.
fn segment_distance(p0: &DVector<f64>, p1: &DVector<f64>, q0: &DVector<f64>, q1: &DVector<f64>) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (p0 + d1 * s - (q0 + d2 * t)).norm()
}

impl RawCurve for TrigSamples {
    fn period(&self) -> f64 {
        TAU
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        let mut out: Vec<DVector<f64>> = (0..=order).map(|_| DVector::zeros(self.mean.len())).collect();
        out[0] += &self.mean;
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        for (idx, (a, b)) in self.modes.iter().enumerate() {
            let k = (idx + 1) as f64;
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            if idx % 16 == 15 {
                // re-anchor the rotation recurrence
                (s, c) = (k * t).sin_cos();
            }
            for (j, v) in out.iter_mut().enumerate() {
                let (cj, sj) = quarter_shift(c, s, j);
                let kj = k.powi(j as i32);
                *v += a * (kj * cj) + b * (kj * sj);
            }
        }
        out
    }
}

/// Adds Fourier modes in the normalized raw parameter to another curve.
#[derive(Debug)]
struct Perturbed {
    base: Box<dyn RawCurve>,
    modes: Vec<(f64, DVector<f64>, DVector<f64>)>,
}

impl Perturbed {
    fn new(base: Box<dyn RawCurve>, modes: &[FourierMode], dim: usize) -> Self {
        let freq = TAU / base.period();
        let vec = |v: &Vec<f64>| if v.is_empty() { DVector::zeros(dim) } else { DVector::from_column_slice(v) };
        let modes = modes.iter().map(|m| (m.k as f64 * freq, vec(&m.cos), vec(&m.sin))).collect();
        Self { base, modes }
    }
}

impl RawCurve for Perturbed {
    fn period(&self) -> f64 {
        self.base.period()
    }

    fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        let mut out = self.base.eval(t, order);
        for (omega, a, b) in &self.modes {
            let (s, c) = (omega * t).sin_cos();
            for (j, v) in out.iter_mut().enumerate() {
                let (cj, sj) = quarter_shift(c, s, j);
                let k = omega.powi(j as i32);
                *v += a * (k * cj) + b * (k * sj);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(raw: &dyn RawCurve, t: f64) {
        let h = 1e-5;
        let d = raw.eval(t, 4);
        for j in 0..4 {
            let plus = &raw.eval(t + h, 4)[j];
            let minus = &raw.eval(t - h, 4)[j];
            let fd = (plus - minus) / (2.0 * h);
            let err = (fd - &d[j + 1]).amax();
            assert!(err < 1e-6 * (1.0 + d[j + 1].amax()), "order {} error {err:e} in {raw:?}", j + 1);
        }
    }

    #[test]
    fn raw_derivatives_match_finite_differences() {
        let specs = [
            CurveSpec::ellipse(2.0, 1.0),
            CurveSpec::coil(0.3, 3),
            CurveSpec::flat_point(),
            CurveSpec::new(CurveKind::FourierConvex { radius: 1.0, cos: vec![0.0, 0.05], sin: vec![0.0, 0.0, 0.02] }),
            CurveSpec::new(CurveKind::OrthogonalCircles { half_width: 0.6 }),
        ];
        for spec in &specs {
            let raw = build_raw(spec, 256).unwrap();
            for t in [0.1, 0.9, 1.7, 2.9, 4.4, 5.9] {
                fd_check(raw.as_ref(), t);
            }
        }
    }

    #[test]
    fn flat_point_closes() {
        let raw = FlatPoint::new(1.0, 2, 256);
        let end = raw.nodes.last().unwrap();
        assert!(end[0].abs() < 1e-14 && end[1].abs() < 1e-14, "{end:?}");
    }

    #[test]
    fn subgroup_orbit_matches_coil() {
        let eps = 0.2;
        let matrix = vec![
            vec![0.0, -1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, -3.0],
            vec![0.0, 0.0, 3.0, 0.0],
        ];
        let orbit = SubgroupOrbit::new(&matrix, &[1.0, 0.0, eps, 0.0], None).unwrap();
        assert!((orbit.period - TAU).abs() < 1e-12);
        let coil = Coil { epsilon: eps, m: 3.0, dim: 4 };
        for t in [0.3, 1.1, 4.0] {
            let a = orbit.eval(t, 4);
            let b = coil.eval(t, 4);
            for j in 0..=4 {
                assert!((&a[j] - &b[j]).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn incommensurate_subgroup_is_rejected() {
        let r = 2f64.sqrt();
        let matrix = vec![
            vec![0.0, -1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, -r],
            vec![0.0, 0.0, r, 0.0],
        ];
        let err = SubgroupOrbit::new(&matrix, &[1.0, 0.0, 0.5, 0.0], None).unwrap_err();
        assert!(matches!(err, Error::Degenerate { ref parameter, .. } if parameter == "matrix"));
    }

    #[test]
    fn trig_samples_reproduce_a_circle() {
        let n = 32;
        let points: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let raw = TrigSamples::new(&points).unwrap();
        let d = raw.eval(0.37, 2);
        assert!((d[0][0] - 0.37f64.cos()).abs() < 1e-13);
        assert!((d[2][1] + 0.37f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn crossing_samples_are_degenerate() {
        // figure eight
        let points: Vec<Vec<f64>> = (0..40)
            .map(|j| {
                let t = TAU * j as f64 / 40.0;
                vec![t.sin(), (2.0 * t).sin()]
            })
            .collect();
        assert!(matches!(TrigSamples::new(&points), Err(Error::Degenerate { .. })));
    }
}
