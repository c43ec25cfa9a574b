use crate::curve::Curve;
use crate::quadrature::{adaptive, gl10};

/// Cumulative `μ([a, x]) = ∫ₐˣ k^{2/3}` over an arc, tabulated and refined by quadrature.
#[derive(Debug, Clone)]
pub struct CumulativeMeasure {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

pub(crate) fn density(curve: &Curve, x: f64) -> f64 {
    curve.curvature(x).powf(2.0 / 3.0)
}

impl CumulativeMeasure {
    /// Tabulates on `panels` equal panels of `[start, end]`.
    pub fn new(curve: &Curve, start: f64, end: f64, panels: usize) -> Self {
        let step = (end - start) / panels as f64;
        let mut values = Vec::with_capacity(panels + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for i in 0..panels {
            let a = start + i as f64 * step;
            acc += adaptive(|x| density(curve, x), a, a + step, 1e-14, 0.0);
            values.push(acc);
        }
        Self { start, step, values }
    }

    pub fn total(&self) -> f64 {
        *self.values.last().expect("non-empty table")
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    /// `μ([start, x])` for x inside the arc.
    pub fn value(&self, curve: &Curve, x: f64) -> f64 {
        let s = ((x - self.start) / self.step).floor();
        let i = (s.max(0.0) as usize).min(self.values.len() - 2);
        let a = self.start + i as f64 * self.step;
        self.values[i] + gl10().integrate(a, x, |t| density(curve, t))
    }

    /// The x with `μ([start, x]) = u`, by safeguarded Newton inside one panel.
    pub fn inverse(&self, curve: &Curve, u: f64) -> f64 {
        let u = u.clamp(0.0, self.total());
        let i = match self.values.partition_point(|&v| v <= u) {
            0 => 0,
            k => (k - 1).min(self.values.len() - 2),
        };
        let (u0, u1) = (self.values[i], self.values[i + 1]);
        let (mut lo, mut hi) = (self.start + i as f64 * self.step, self.start + (i + 1) as f64 * self.step);
        let frac = if u1 > u0 { (u - u0) / (u1 - u0) } else { 0.5 };
        let mut x = lo + frac * (hi - lo);
        for _ in 0..60 {
            let f = self.value(curve, x) - u;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = density(curve, x);
            let newton = if d > 0.0 { x - f / d } else { f64::NAN };
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(self.step) {
                return next;
            }
            x = next;
        }
        x
    }
}
