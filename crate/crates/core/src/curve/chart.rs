//! Arc-length chart: the map between the raw parameter t and arc length x.

use super::raw::RawCurve;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, gl10};

#[derive(Debug, Clone)]
pub(crate) enum Chart {
    /// x = speed·t exactly.
    Uniform { speed: f64 },
    /// Cumulative arc length tabulated at equally spaced raw nodes.
    Tabulated {
        step: f64,
        xs: Vec<f64>,
        speeds: Vec<f64>,
    },
}

impl Chart {
    pub(crate) fn build(raw: &dyn RawCurve, resolution: usize, kind: &str) -> Result<Self> {
        if let Some(speed) = raw.constant_speed() {
            if !(speed.is_finite() && speed > 0.0) {
                return Err(Error::Degenerate {
                    parameter: kind.into(),
                    reason: format!("raw speed is {speed}"),
                });
            }
            return Ok(Chart::Uniform { speed });
        }
        let period = raw.period();
        let step = period / resolution as f64;
        let speeds: Vec<f64> = (0..=resolution).map(|i| raw.speed(i as f64 * step)).collect();
        let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::Degenerate {
                parameter: kind.into(),
                reason: "curve has zero length".into(),
            });
        }
        let mut xs = Vec::with_capacity(resolution + 1);
        xs.push(0.0);
        let mut acc = 0.0;
        for i in 0..resolution {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            let mid = raw.speed(0.5 * (a + b));
            if speeds[i].min(mid) <= 1e-10 * mean {
                return Err(Error::Degenerate {
                    parameter: kind.into(),
                    reason: format!("raw speed vanishes near t = {a:.6}; the curve has a cusp"),
                });
            }
            acc += adaptive(|t| raw.speed(t), a, b, 1e-15, 0.0);
            xs.push(acc);
        }
        Ok(Chart::Tabulated { step, xs, speeds })
    }

    pub(crate) fn length(&self, period: f64) -> f64 {
        match self {
            Chart::Uniform { speed } => speed * period,
            Chart::Tabulated { xs, .. } => *xs.last().expect("non-empty chart"),
        }
    }

    /// Arc length at raw parameter `t ∈ [0, period]`.
    pub(crate) fn x_of_t(&self, raw: &dyn RawCurve, t: f64) -> f64 {
        match self {
            Chart::Uniform { speed } => speed * t,
            Chart::Tabulated { step, xs, .. } => {
                let i = ((t / step) as usize).min(xs.len() - 2);
                let a = i as f64 * step;
                xs[i] + gl10().integrate(a, t, |s| raw.speed(s))
            }
        }
    }

    /// Raw parameter at arc length `x ∈ [0, length]`.
    pub(crate) fn t_of_x(&self, raw: &dyn RawCurve, x: f64) -> f64 {
        match self {
            Chart::Uniform { speed } => x / speed,
            Chart::Tabulated { step, xs, speeds } => {
                let i = match xs.partition_point(|&v| v <= x) {
                    0 => 0,
                    k => (k - 1).min(xs.len() - 2),
                };
                let (x0, x1) = (xs[i], xs[i + 1]);
                let (t0, t1) = (i as f64 * step, (i + 1) as f64 * step);
                let dx = x1 - x0;
                let s = ((x - x0) / dx).clamp(0.0, 1.0);
                // cubic Hermite guess for t(x) with slopes dt/dx = 1/σ
                let (m0, m1) = (dx / speeds[i], dx / speeds[i + 1]);
                let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
                let h10 = s * s * s - 2.0 * s * s + s;
                let h01 = -2.0 * s * s * s + 3.0 * s * s;
                let h11 = s * s * s - s * s;
                let mut t = h00 * t0 + h10 * m0 + h01 * t1 + h11 * m1;
                t = t.clamp(t0, t1);
                for _ in 0..8 {
                    let f = x0 + gl10().integrate(t0, t, |u| raw.speed(u)) - x;
                    let dt = f / raw.speed(t);
                    t = (t - dt).clamp(t0, t1);
                    if dt.abs() <= 1e-15 * step.max(t.abs()) {
                        break;
                    }
                }
                t
            }
        }
    }
}
