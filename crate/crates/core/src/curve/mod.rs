//! Arc-length parameterized curves in Rⁿ and their built-in families.

mod chart;
mod raw;
mod spec;

use std::sync::OnceLock;

use nalgebra::DVector;

pub use spec::{CurveKind, CurveSpec, FourierMode};

use crate::error::{Error, Result};
use crate::reflection::{NicenessReport, ScanGrid};
use chart::Chart;
use raw::RawCurve;

/// Default number of chart nodes per period.
pub const DEFAULT_RESOLUTION: usize = 512;

/// Curvature below which the principal normal is reported as undefined.
pub const CURVATURE_FLOOR: f64 = 1e-14;

/// An immutable curve with an arc-length chart.
///
/// Arc length `x` runs over `[0, |γ|)`; closed curves accept any real `x` and
/// reduce it modulo `|γ|`.
#[derive(Debug)]
pub struct Curve {
    spec: CurveSpec,
    raw: Box<dyn RawCurve>,
    chart: Chart,
    length: f64,
    dim: usize,
    pub(crate) scan: OnceLock<ScanGrid>,
    pub(crate) niceness: OnceLock<NicenessReport>,
}

/// Position, arc-length derivatives and Frenet data at one point.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub x: f64,
    /// `[γ, γ̇, γ̈, γ⃛, γ⃜]`, truncated at the requested order.
    pub derivatives: Vec<DVector<f64>>,
    /// `|γ̈|`, present when order ≥ 2.
    pub curvature: Option<f64>,
    /// `γ̈/k`, absent when order < 2 or the curvature is below [`CURVATURE_FLOOR`].
    pub normal: Option<DVector<f64>>,
}

impl CurvePoint {
    pub fn position(&self) -> &DVector<f64> {
        &self.derivatives[0]
    }

    pub fn tangent(&self) -> &DVector<f64> {
        &self.derivatives[1]
    }

    pub fn acceleration(&self) -> &DVector<f64> {
        &self.derivatives[2]
    }

    pub fn derivative(&self, order: usize) -> Option<&DVector<f64>> {
        self.derivatives.get(order)
    }
}

impl Curve {
    /// Builds a curve with `resolution` chart nodes per period (at least 64).
    pub fn build(spec: CurveSpec, resolution: usize) -> Result<Self> {
        if resolution < 64 {
            return Err(Error::arg("resolution", format!("must be at least 64, got {resolution}")));
        }
        spec.validate()?;
        let raw = raw::build_raw(&spec, resolution)?;
        let chart = Chart::build(raw.as_ref(), resolution, spec.kind_name())?;
        let length = chart.length(raw.period());
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Degenerate {
                parameter: spec.kind_name().into(),
                reason: format!("curve length is {length}"),
            });
        }
        let dim = spec.dim();
        Ok(Self {
            spec,
            raw,
            chart,
            length,
            dim,
            scan: OnceLock::new(),
            niceness: OnceLock::new(),
        })
    }

    /// Builds with [`DEFAULT_RESOLUTION`].
    pub fn new(spec: CurveSpec) -> Result<Self> {
        Self::build(spec, DEFAULT_RESOLUTION)
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    /// Total length |γ|.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.spec.closed
    }

    /// Period of the raw parameter t.
    pub fn raw_period(&self) -> f64 {
        self.raw.period()
    }

    /// Reduces `x` to `[0, |γ|)` on closed curves; checks the range on open ones.
    pub fn reduce(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::arg("x", format!("not finite: {x}")));
        }
        if self.is_closed() {
            return Ok(crate::util::wrap(x, self.length));
        }
        let slack = 1e-12 * self.length;
        if x < -slack || x > self.length + slack {
            return Err(Error::arg("x", format!("{x} outside the open curve [0, {}]", self.length)));
        }
        Ok(x.clamp(0.0, self.length))
    }

    /// Arc length of the raw parameter `t` (raw period multiples add whole lengths).
    pub fn x_of_t(&self, t: f64) -> f64 {
        let period = self.raw.period();
        let turns = (t / period).floor();
        let r = (t - turns * period).clamp(0.0, period);
        turns * self.length + self.chart.x_of_t(self.raw.as_ref(), r)
    }

    /// Speed `|γ'(t)|` of the raw parametrization.
    pub fn raw_speed(&self, t: f64) -> f64 {
        self.raw.speed(t)
    }

    /// Raw parameter of arc length `x`, in `[0, raw period)` after reduction.
    pub fn t_of_x(&self, x: f64) -> Result<f64> {
        let x = self.reduce(x)?;
        Ok(self.chart.t_of_x(self.raw.as_ref(), x))
    }

    /// Arc-length derivatives of orders `0..=order` at `x`.
    pub fn evaluate(&self, x: f64, order: usize) -> Result<CurvePoint> {
        if order > 4 {
            return Err(Error::DerivativeOrder(order));
        }
        let x = self.reduce(x)?;
        let derivatives = self.derivatives(x, order);
        let (curvature, normal) = if order >= 2 {
            let k = derivatives[2].norm();
            if k < CURVATURE_FLOOR {
                (Some(0.0), None)
            } else {
                (Some(k), Some(&derivatives[2] / k))
            }
        } else {
            (None, None)
        };
        Ok(CurvePoint {
            x,
            derivatives,
            curvature,
            normal,
        })
    }

    /// Unchecked fast path: `x` is reduced but not validated, order ≤ 4.
    pub(crate) fn derivatives(&self, x: f64, order: usize) -> Vec<DVector<f64>> {
        let x = self.reduce_unchecked(x);
        let t = self.chart.t_of_x(self.raw.as_ref(), x);
        let raw = self.raw.eval(t, order);
        to_arc_length(raw, order)
    }

    pub fn position(&self, x: f64) -> DVector<f64> {
        self.derivatives(x, 0).swap_remove(0)
    }

    /// Unit tangent γ̇(x).
    pub fn tangent(&self, x: f64) -> DVector<f64> {
        let x = self.reduce_unchecked(x);
        let v = self.raw.velocity(self.chart.t_of_x(self.raw.as_ref(), x));
        let n = v.norm();
        v / n
    }

    /// Curvature `k(x) = |γ̈(x)|`.
    pub fn curvature(&self, x: f64) -> f64 {
        self.derivatives(x, 2)[2].norm()
    }

    /// `γ(y) − γ(x)`.
    ///
    /// Chords shorter than [`SHORT_CHORD`]·|γ| (forward or backward) are obtained by
    /// integrating the raw velocity, which avoids the cancellation in the
    /// difference of two nearby positions.
    pub fn chord_vector(&self, x: f64, y: f64) -> DVector<f64> {
        let short = SHORT_CHORD * self.length;
        let period = self.raw.period();
        let x = self.reduce_unchecked(x);
        let y = self.reduce_unchecked(y);
        let tx = self.chart.t_of_x(self.raw.as_ref(), x);
        let ty = self.chart.t_of_x(self.raw.as_ref(), y);
        if self.is_closed() {
            let d = crate::util::forward(x, y, self.length);
            if d <= short {
                return self.integrate_velocity(tx, tx + crate::util::forward(tx, ty, period));
            }
            if self.length - d <= short {
                return -self.integrate_velocity(ty, ty + crate::util::forward(ty, tx, period));
            }
        } else if (y - x).abs() <= short {
            return self.integrate_velocity(tx, ty);
        }
        self.raw.eval(ty, 0).swap_remove(0) - self.raw.eval(tx, 0).swap_remove(0)
    }

    fn integrate_velocity(&self, a: f64, b: f64) -> DVector<f64> {
        let rule = crate::quadrature::gl10();
        let panels = ((b - a).abs() / (self.raw.period() / 128.0)).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut acc = DVector::zeros(self.dim);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (s, w) in rule.nodes.iter().zip(&rule.weights) {
                acc += self.raw.velocity(mid + 0.5 * h * s) * *w;
            }
        }
        acc * (0.5 * h)
    }

    fn reduce_unchecked(&self, x: f64) -> f64 {
        if self.is_closed() {
            crate::util::wrap(x, self.length)
        } else {
            x.clamp(0.0, self.length)
        }
    }
}

/// Chords below this fraction of |γ| are computed by quadrature of the tangent.
pub const SHORT_CHORD: f64 = 0.02;

/// Converts raw t-derivatives into arc-length derivatives by the chain rule with
/// `w = 1/|γ'|` and `d/dx = w·d/dt`.
fn to_arc_length(raw: Vec<DVector<f64>>, order: usize) -> Vec<DVector<f64>> {
    if order == 0 {
        return raw;
    }
    let g1 = &raw[1];
    let q = g1.dot(g1);
    let w = q.powf(-0.5);
    let mut out = Vec::with_capacity(order + 1);
    out.push(raw[0].clone());
    out.push(g1 * w);
    if order == 1 {
        return out;
    }
    let g2 = &raw[2];
    let q1 = 2.0 * g2.dot(g1);
    let w1 = -0.5 * w / q * q1;
    out.push(g1 * (w * w1) + g2 * (w * w));
    if order == 2 {
        return out;
    }
    let g3 = &raw[3];
    let q2 = 2.0 * (g3.dot(g1) + g2.dot(g2));
    let w2 = 0.75 * w / (q * q) * q1 * q1 - 0.5 * w / q * q2;
    out.push(g1 * (w * (w1 * w1 + w * w2)) + g2 * (3.0 * w * w * w1) + g3 * (w * w * w));
    if order == 3 {
        return out;
    }
    let g4 = &raw[4];
    let q3 = 2.0 * (g4.dot(g1) + 3.0 * g3.dot(g2));
    let w3 = -1.875 * w / (q * q * q) * q1 * q1 * q1 + 2.25 * w / (q * q) * q1 * q2 - 0.5 * w / q * q3;
    let c1 = w * (w1 * w1 * w1 + 4.0 * w * w1 * w2 + w * w * w3);
    let c2 = w * (7.0 * w * w1 * w1 + 4.0 * w * w * w2);
    let c3 = 6.0 * w * w * w * w1;
    let c4 = w * w * w * w;
    out.push(g1 * c1 + g2 * c2 + g3 * c3 + g4 * c4);
    out
}
