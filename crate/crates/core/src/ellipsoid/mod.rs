//! Confocal ellipsoid billiards, the geodesic flow on an ellipsoid and its
//! k^{-2/3}-rescaled version.
//!
//! Members of the family are `M_λ = {x : Σ xᵢ²/(aᵢ² + λ) = 1}` with operator
//! `A_λ = diag(1/(aᵢ² + λ))`.

mod integrator;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use integrator::{dopri5, StepStats};

use crate::error::{Error, Result};
use crate::roots::{brent, Tolerance};

/// Default local error tolerance of the geodesic integrator.
pub const FLOW_TOLERANCE: f64 = 1e-12;

/// Confocal quadrics sharing the base semi-axes `a₁ > … > aₙ > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfocalFamily {
    axes: Vec<f64>,
}

impl ConfocalFamily {
    pub fn new(axes: Vec<f64>) -> Result<Self> {
        if axes.len() < 2 {
            return Err(Error::arg("axes", "need at least two semi-axes"));
        }
        if axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::arg("axes", format!("semi-axes must be positive, got {axes:?}")));
        }
        if axes.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::arg("axes", format!("semi-axes must be distinct and decreasing, got {axes:?}")));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[f64] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    fn check_member(&self, lambda: f64) -> Result<()> {
        let amin = *self.axes.last().expect("axes");
        if !(lambda > -amin * amin) {
            return Err(Error::arg("lambda", format!("{lambda} is not an ellipsoid of the family")));
        }
        Ok(())
    }

    /// Diagonal of `A_λ`.
    pub fn operator(&self, lambda: f64) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.axes.iter().map(|a| 1.0 / (a * a + lambda)))
    }

    /// `A_λ x · x − 1`.
    pub fn level(&self, lambda: f64, x: &DVector<f64>) -> f64 {
        self.operator(lambda).component_mul(x).dot(x) - 1.0
    }
}

/// A point of `M_λ` with a unit tangent velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub x: DVector<f64>,
    pub v: DVector<f64>,
    /// Elapsed time in the clock of the last flow applied.
    pub clock: f64,
}

/// An oriented line through `p` with unit direction `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineState {
    pub p: DVector<f64>,
    pub q: DVector<f64>,
}

impl LineState {
    pub fn new(p: DVector<f64>, q: DVector<f64>) -> Result<Self> {
        let n = q.norm();
        if p.len() != q.len() || !(n > 0.0) {
            return Err(Error::Geometry("line needs matching dimensions and a non-zero direction".into()));
        }
        Ok(Self { p, q: q / n })
    }

    /// Point of the line closest to the origin.
    pub fn foot(&self) -> DVector<f64> {
        &self.p - &self.q * self.p.dot(&self.q)
    }

    /// Foot-point distance plus direction distance.
    pub fn distance(&self, other: &LineState) -> f64 {
        (self.foot() - other.foot()).norm() + (&self.q - &other.q).norm()
    }
}

/// Clock of the geodesic flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMode {
    /// Unit speed.
    ArcLength,
    /// Speed k^{-2/3}, k the normal curvature in the direction of motion.
    Xi,
}

/// Normal curvature `k = A v·v / |A x|` of `M_λ` at x in the direction v.
pub fn normal_curvature(family: &ConfocalFamily, lambda: f64, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let a = family.operator(lambda);
    a.component_mul(v).dot(v) / a.component_mul(x).norm()
}

impl GeodesicState {
    /// Validates the state on `M_λ` to 1e-10.
    pub fn new(family: &ConfocalFamily, lambda: f64, x: DVector<f64>, v: DVector<f64>) -> Result<Self> {
        family.check_member(lambda)?;
        if x.len() != family.dim() || v.len() != family.dim() {
            return Err(Error::arg("x", "dimension does not match the family"));
        }
        let ax = family.operator(lambda).component_mul(&x);
        let drift = family.level(lambda, &x).abs().max((v.norm() - 1.0).abs()).max(v.dot(&ax).abs() / ax.norm());
        if drift > 1e-10 {
            return Err(Error::Geometry(format!("state is off the constraint manifold by {drift:e}")));
        }
        Ok(Self { x, v, clock: 0.0 })
    }

    /// Projects an arbitrary point and direction onto `M_λ` and its tangent space.
    pub fn project(family: &ConfocalFamily, lambda: f64, x: &DVector<f64>, v: &DVector<f64>) -> Result<Self> {
        family.check_member(lambda)?;
        let a = family.operator(lambda);
        let (mut x, mut v) = (x.clone(), v.clone());
        project_state(&a, &mut x, &mut v);
        if !(v.norm() - 1.0).abs().lt(&1e-12) {
            return Err(Error::Geometry("direction is normal to the ellipsoid".into()));
        }
        Ok(Self { x, v, clock: 0.0 })
    }

    /// The tangent line of the geodesic.
    pub fn tangent_line(&self) -> LineState {
        LineState {
            p: self.x.clone(),
            q: self.v.clone(),
        }
    }
}

fn project_state(a: &DVector<f64>, x: &mut DVector<f64>, v: &mut DVector<f64>) {
    let scale = a.component_mul(x).dot(x).sqrt();
    *x /= scale;
    let n = a.component_mul(x);
    let n = &n / n.norm();
    *v -= &n * v.dot(&n);
    let s = v.norm();
    if s > 0.0 {
        *v /= s;
    }
}

/// Constraint and curvature checks gathered along a flow.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct FlowReport {
    /// Largest `|A x·x − 1|`, `||v| − 1|` or `|v·n|` before projection.
    pub max_drift: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Flows `s0` along the geodesics of `M_λ` for `duration` in the given clock.
pub fn geodesic_flow(
    family: &ConfocalFamily,
    lambda: f64,
    s0: &GeodesicState,
    duration: f64,
    mode: FlowMode,
) -> Result<GeodesicState> {
    geodesic_flow_report(family, lambda, s0, duration, mode, FLOW_TOLERANCE).map(|r| r.0)
}

/// [`geodesic_flow`] with an explicit tolerance and the drift report.
pub fn geodesic_flow_report(
    family: &ConfocalFamily,
    lambda: f64,
    s0: &GeodesicState,
    duration: f64,
    mode: FlowMode,
    tol: f64,
) -> Result<(GeodesicState, FlowReport)> {
    family.check_member(lambda)?;
    if !duration.is_finite() {
        return Err(Error::arg("duration", "must be finite"));
    }
    let n = family.dim();
    let a = family.operator(lambda);
    let mut y = DVector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(&s0.x);
    y.rows_mut(n, n).copy_from(&s0.v);
    let rhs = |y: &DVector<f64>| {
        let x = y.rows(0, n);
        let v = y.rows(n, n);
        let ax = a.component_mul(&x);
        let avv = a.component_mul(&v).dot(&v);
        let axn2 = ax.norm_squared();
        let speed = match mode {
            FlowMode::ArcLength => 1.0,
            FlowMode::Xi => (avv / axn2.sqrt()).powf(-2.0 / 3.0),
        };
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(v * speed));
        out.rows_mut(n, n).copy_from(&(ax * (-speed * avv / axn2)));
        out
    };
    let mut drift = 0.0f64;
    let project = |y: &mut DVector<f64>| {
        let mut x: DVector<f64> = y.rows(0, n).into();
        let mut v: DVector<f64> = y.rows(n, n).into();
        let ax = a.component_mul(&x);
        let d = (ax.dot(&x) - 1.0)
            .abs()
            .max((v.norm() - 1.0).abs())
            .max(v.dot(&ax).abs() / ax.norm());
        drift = drift.max(d);
        project_state(&a, &mut x, &mut v);
        y.rows_mut(0, n).copy_from(&x);
        y.rows_mut(n, n).copy_from(&v);
    };
    let (y, stats) = dopri5(rhs, project, y, duration, tol)?;
    if drift > 1e-8 {
        return Err(Error::Integration(format!("constraint drift {drift:e} exceeds 1e-8")));
    }
    let state = GeodesicState {
        x: y.rows(0, n).into(),
        v: y.rows(n, n).into(),
        clock: s0.clock + duration,
    };
    Ok((
        state,
        FlowReport {
            max_drift: drift,
            accepted_steps: stats.accepted,
            rejected_steps: stats.rejected,
        },
    ))
}

/// Line parameters where the line meets `M_λ`, in increasing order.
fn intersections(a: &DVector<f64>, line: &LineState) -> Option<(f64, f64)> {
    let qa = a.component_mul(&line.q);
    let aa = qa.dot(&line.q);
    let b = qa.dot(&line.p);
    let c = a.component_mul(&line.p).dot(&line.p) - 1.0;
    let disc = b * b - aa * c;
    if !(disc > 1e-14 * b.abs().max(aa).powi(2)) {
        return None;
    }
    let root = disc.sqrt();
    // stable pairing of the two roots
    let big = -(b + b.signum() * root);
    let (s1, s2) = if big != 0.0 { (big / aa, c / big) } else { (-root / aa, root / aa) };
    Some((s1.min(s2), s1.max(s2)))
}

/// Reflects the oriented line in `M_λ` at its exit point.
pub fn reflect_line(family: &ConfocalFamily, lambda: f64, line: &LineState) -> Result<LineState> {
    family.check_member(lambda)?;
    let a = family.operator(lambda);
    let (_, s) = intersections(&a, line).ok_or_else(|| {
        Error::Geometry(format!("line misses or is tangent to the ellipsoid λ = {lambda}"))
    })?;
    let x = &line.p + &line.q * s;
    let nrm = a.component_mul(&x);
    let nrm = &nrm / nrm.norm();
    let q = &line.q - &nrm * (2.0 * line.q.dot(&nrm));
    Ok(LineState { p: x, q: &q / q.norm() })
}

/// `P(λ) = Σ qᵢ² Π_{j≠i} cⱼ − Σ_{i<j} Mᵢⱼ² Π_{k≠i,j} c_k`, `c = a² + λ`,
/// `Mᵢⱼ = pᵢqⱼ − pⱼqᵢ`, whose zeros are the confocal quadrics tangent to the line.
fn tangency_polynomial(axes: &[f64], line: &LineState, lambda: f64) -> f64 {
    let n = axes.len();
    let c: Vec<f64> = axes.iter().map(|a| a * a + lambda).collect();
    let prod_except = |skip: &[usize]| -> f64 { (0..n).filter(|k| !skip.contains(k)).map(|k| c[k]).product() };
    let (p, q) = (&line.p, &line.q);
    let mut total = 0.0;
    for i in 0..n {
        total += q[i] * q[i] * prod_except(&[i]);
        for j in i + 1..n {
            let m = p[i] * q[j] - p[j] * q[i];
            total -= m * m * prod_except(&[i, j]);
        }
    }
    total
}

/// The n − 1 parameters λ of the confocal quadrics tangent to the line.
///
/// Each interval between consecutive poles `−aᵢ²` of the discriminant (and the
/// last pole to a Cauchy bound) is scanned for sign changes of the numerator.
pub fn tangency_parameters(family: &ConfocalFamily, line: &LineState) -> Result<Vec<f64>> {
    let axes = family.axes();
    let n = axes.len();
    if line.p.len() != n {
        return Err(Error::arg("line", "dimension does not match the family"));
    }
    let p = |l: f64| tangency_polynomial(axes, line, l);
    let pn = line.p.norm();
    let bound = axes[0] * axes[0] + pn * pn + 1.0;
    let mut cuts: Vec<f64> = axes.iter().rev().map(|a| -a * a).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.push(bound);
    let tol = Tolerance {
        ftol: 0.0,
        xtol: 1e-15,
        ..Tolerance::default()
    };
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let cells = 256;
        let h = (w[1] - w[0]) / cells as f64;
        let mut prev = (w[0], p(w[0]));
        for i in 1..=cells {
            let l = if i == cells { w[1] } else { w[0] + i as f64 * h };
            let cur = (l, p(l));
            if prev.1 != 0.0 && cur.1 != 0.0 && prev.1.signum() != cur.1.signum() {
                roots.push(brent(p, prev.0, cur.0, prev.1, cur.1, tol)?);
            }
            prev = cur;
        }
    }
    if roots.len() != n - 1 {
        return Err(Error::Geometry(format!(
            "degenerate line: found {} tangency parameters instead of {}",
            roots.len(),
            n - 1
        )));
    }
    Ok(roots)
}

/// Point where a line tangent to `M_λ` touches it, as a geodesic state.
pub fn tangency_state(family: &ConfocalFamily, lambda: f64, line: &LineState) -> Result<GeodesicState> {
    let a = family.operator(lambda);
    let qa = a.component_mul(&line.q);
    let s = -qa.dot(&line.p) / qa.dot(&line.q);
    let x = &line.p + &line.q * s;
    let gap = family.level(lambda, &x).abs();
    if gap > 1e-6 {
        return Err(Error::Geometry(format!("line is not tangent to M_{lambda} (level gap {gap:e})")));
    }
    GeodesicState::project(family, lambda, &x, &line.q)
}

/// Line distances between reflect∘flow and flow∘reflect.
#[derive(Debug, Clone, Serialize)]
pub struct CommuteReport {
    pub axes: Vec<f64>,
    pub lambda: f64,
    pub tau: f64,
    pub xi_gap: f64,
    pub arc_length_gap: f64,
    pub tolerance: f64,
    pub max_drift: f64,
}

fn commute_gap(
    family: &ConfocalFamily,
    lambda: f64,
    geo: &GeodesicState,
    tau: f64,
    mode: FlowMode,
    tol: f64,
) -> Result<(f64, f64)> {
    let (flowed, r1) = geodesic_flow_report(family, 0.0, geo, tau, mode, tol)?;
    let first = reflect_line(family, lambda, &flowed.tangent_line())?;
    let reflected = reflect_line(family, lambda, &geo.tangent_line())?;
    let start = tangency_state(family, 0.0, &reflected)?;
    let (moved, r2) = geodesic_flow_report(family, 0.0, &start, tau, mode, tol)?;
    Ok((first.distance(&moved.tangent_line()), r1.max_drift.max(r2.max_drift)))
}

/// Compares reflection in `M_λ` with the flow on `M_0`, in both clocks.
pub fn commute_report(family: &ConfocalFamily, lambda: f64, geo: &GeodesicState, tau: f64) -> Result<CommuteReport> {
    commute_report_with(family, lambda, geo, tau, FLOW_TOLERANCE)
}

pub fn commute_report_with(
    family: &ConfocalFamily,
    lambda: f64,
    geo: &GeodesicState,
    tau: f64,
    tol: f64,
) -> Result<CommuteReport> {
    family.check_member(lambda)?;
    if lambda <= 0.0 {
        return Err(Error::arg("lambda", "the reflecting ellipsoid must enclose M_0 (λ > 0)"));
    }
    let (xi_gap, d1) = commute_gap(family, lambda, geo, tau, FlowMode::Xi, tol)?;
    let (arc_length_gap, d2) = commute_gap(family, lambda, geo, tau, FlowMode::ArcLength, tol)?;
    Ok(CommuteReport {
        axes: family.axes().to_vec(),
        lambda,
        tau,
        xi_gap,
        arc_length_gap,
        tolerance: tol,
        max_drift: d1.max(d2),
    })
}

/// Canonical chart of a line: tangent-plane coordinates u of q around its
/// dominant axis and the conjugate momenta `πⱼ = p·∂q/∂uⱼ`.
fn line_chart(line: &LineState, axis: usize) -> DVector<f64> {
    let n = line.q.len();
    let qc = line.q[axis];
    let mut out = DVector::zeros(2 * (n - 1));
    for (j, i) in (0..n).filter(|&i| i != axis).enumerate() {
        out[j] = line.q[i];
        out[n - 1 + j] = line.p[i] - line.p[axis] * line.q[i] / qc;
    }
    out
}

fn line_from_chart(z: &DVector<f64>, axis: usize, sign: f64, n: usize) -> Result<LineState> {
    let others: Vec<usize> = (0..n).filter(|&i| i != axis).collect();
    let u2: f64 = (0..n - 1).map(|j| z[j] * z[j]).sum();
    if u2 >= 1.0 {
        return Err(Error::Geometry("chart point outside the unit ball".into()));
    }
    let mut q = DVector::zeros(n);
    q[axis] = sign * (1.0 - u2).sqrt();
    for (j, &i) in others.iter().enumerate() {
        q[i] = z[j];
    }
    // p ⊥ q and p·∂q/∂uⱼ = πⱼ
    let mut m = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (j, &i) in others.iter().enumerate() {
        m[(j, i)] = 1.0;
        m[(j, axis)] = -z[j] / q[axis];
        rhs[j] = z[n - 1 + j];
    }
    for k in 0..n {
        m[(n - 1, k)] = q[k];
    }
    let p = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Geometry("singular line chart".into()))?;
    Ok(LineState { p, q })
}

/// Determinant of the finite-difference Jacobian of [`reflect_line`] in
/// canonical line coordinates; symplecticity makes it 1.
pub fn reflection_jacobian(family: &ConfocalFamily, lambda: f64, line: &LineState, h: f64) -> Result<f64> {
    let n = family.dim();
    let dominant = |q: &DVector<f64>| q.iamax();
    let axis_in = dominant(&line.q);
    let sign_in = line.q[axis_in].signum();
    let image = reflect_line(family, lambda, line)?;
    let axis_out = dominant(&image.q);
    let sign_out = image.q[axis_out].signum();
    let z0 = line_chart(line, axis_in);
    let map = |z: &DVector<f64>| -> Result<DVector<f64>> {
        let l = line_from_chart(z, axis_in, sign_in, n)?;
        let out = reflect_line(family, lambda, &l)?;
        if out.q[axis_out].signum() != sign_out {
            return Err(Error::Geometry("image left the output chart".into()));
        }
        Ok(line_chart(&out, axis_out))
    };
    let dim = 2 * (n - 1);
    let mut jac = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let mut zp = z0.clone();
        let mut zm = z0.clone();
        zp[c] += h;
        zm[c] -= h;
        let col = (map(&zp)? - map(&zm)?) / (2.0 * h);
        jac.set_column(c, &col);
    }
    Ok(jac.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn focal_chord_passes_other_focus() {
        let fam = ConfocalFamily::new(vec![2.0, 1.0]).unwrap();
        let c = 3f64.sqrt();
        let line = LineState::new(DVector::from_vec(vec![-c, 0.0]), DVector::from_vec(vec![1.0, 0.3])).unwrap();
        let out = reflect_line(&fam, 0.0, &line).unwrap();
        let to_focus = DVector::from_vec(vec![c, 0.0]) - &out.p;
        let cross = out.q[0] * to_focus[1] - out.q[1] * to_focus[0];
        assert!(cross.abs() < 1e-12, "{cross}");
    }

    #[test]
    fn tangent_line_has_zero_parameter() {
        let fam = ConfocalFamily::new(vec![2.0, 1.5, 1.0]).unwrap();
        let x = DVector::from_vec(vec![1.0, 0.5, 0.0]);
        let x = &x / fam.operator(0.0).component_mul(&x).dot(&x).sqrt();
        let s = GeodesicState::project(&fam, 0.0, &x, &DVector::from_vec(vec![0.1, 0.2, 1.0])).unwrap();
        let ls = tangency_parameters(&fam, &s.tangent_line()).unwrap();
        assert!(ls.iter().any(|l| l.abs() < 1e-9), "{ls:?}");
    }
}
