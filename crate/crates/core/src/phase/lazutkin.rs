use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::measure::{density, CumulativeMeasure};
use crate::chord::chord_angles;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::quadrature::adaptive;
use crate::reflection::solve_chord;
use crate::util::forward;

/// Curvatures below this fraction of the mean make the chart undefined.
const FLAT_RATIO: f64 = 1e-8;

/// Near-boundary coordinates `u = ∫₀ˣ k^{2/3}`, `v = k^{-1/3} sin(α/2)`.
#[derive(Debug, Clone)]
pub struct LazutkinChart {
    measure: CumulativeMeasure,
    length: f64,
}

/// Builds the chart of a closed curve with positive curvature.
pub fn lazutkin_chart(curve: &Curve) -> Result<LazutkinChart> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let len = curve.length();
    let probes = 4096;
    let ks: Vec<f64> = (0..probes).map(|i| curve.curvature(i as f64 * len / probes as f64)).collect();
    let mean = ks.iter().sum::<f64>() / probes as f64;
    let (imin, kmin) = ks
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("probes");
    if kmin <= FLAT_RATIO * mean {
        return Err(Error::ZeroCurvature {
            x: imin as f64 * len / probes as f64,
            k: kmin,
        });
    }
    Ok(LazutkinChart {
        measure: CumulativeMeasure::new(curve, 0.0, len, 1024),
        length: len,
    })
}

impl LazutkinChart {
    /// Total u-period `U = ∫ k^{2/3} dx`.
    pub fn period(&self) -> f64 {
        self.measure.total()
    }

    /// `u(x)`, extended by `u(x + |γ|) = u(x) + U`.
    pub fn u(&self, curve: &Curve, x: f64) -> f64 {
        let turns = (x / self.length).floor();
        let r = (x - turns * self.length).clamp(0.0, self.length);
        turns * self.period() + self.measure.value(curve, r)
    }

    /// Inverse of [`LazutkinChart::u`].
    pub fn x_of_u(&self, curve: &Curve, u: f64) -> f64 {
        let total = self.period();
        let turns = (u / total).floor();
        let r = (u - turns * total).clamp(0.0, total);
        turns * self.length + self.measure.inverse(curve, r)
    }

    pub fn v(&self, curve: &Curve, x: f64, alpha: f64) -> f64 {
        v_coordinate(curve, x, alpha)
    }
}

pub(crate) fn v_coordinate(curve: &Curve, x: f64, alpha: f64) -> f64 {
    curve.curvature(x).powf(-1.0 / 3.0) * (0.5 * alpha).sin()
}

/// Mean residuals at one angle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LazutkinSample {
    pub alpha: f64,
    pub mean_v: f64,
    /// Mean of `|u₁ − u − 4v|`.
    pub res_u: f64,
    /// Mean of `|v₁ − v|`.
    pub res_v: f64,
    pub used_u: bool,
    pub used_v: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LazutkinFit {
    /// Power-law exponent of `|u₁ − u − 4v|` in v; `None` with fewer than two usable points.
    pub e_u: Option<f64>,
    pub e_v: Option<f64>,
    pub samples: Vec<LazutkinSample>,
    pub seed: u64,
}

/// One reflection step from `points` random base points per angle, with residuals
/// of the near-translation form fitted as power laws in v.
///
/// The same base points are used for every angle. Residuals within 100 ulps of
/// their round-off level are left out of the fits.
pub fn lazutkin_residuals(curve: &Curve, alphas: &[f64], points: usize, seed: u64) -> Result<LazutkinFit> {
    let report = curve.niceness();
    if !report.pass {
        return Err(Error::NotNice(report.summary()));
    }
    if alphas.len() < 2 || points == 0 {
        return Err(Error::arg("alphas", "need at least two angles and one base point"));
    }
    if let Some(bad) = alphas.windows(2).find(|w| w[1] >= w[0]) {
        return Err(Error::arg("alphas", format!("must decrease, found {} then {}", bad[0], bad[1])));
    }
    let len = curve.length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..points).map(|_| rng.gen_range(0.0..len)).collect();
    let kmin = report.min_curvature;
    let mut samples = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let (mut su, mut sv, mut sres_u, mut sres_v) = (0.0, 0.0, 0.0, 0.0);
        for &x in &xs {
            let y = solve_chord(curve, x, alpha, None)?;
            let d = forward(x, y, len);
            let (a, b, _) = chord_angles(curve, x, y);
            let v = v_coordinate(curve, x, a);
            let v1 = v_coordinate(curve, y, b);
            let du = adaptive(|t| density(curve, t), x, x + d, 1e-15, 0.0);
            su += 4.0 * v;
            sv += v;
            sres_u += (du - 4.0 * v).abs();
            sres_v += (v1 - v).abs();
        }
        let m = points as f64;
        let floor_u = 100.0 * f64::EPSILON * su / m;
        let floor_v = 100.0 * f64::EPSILON * kmin.powf(-1.0 / 3.0);
        let (res_u, res_v) = (sres_u / m, sres_v / m);
        samples.push(LazutkinSample {
            alpha,
            mean_v: sv / m,
            res_u,
            res_v,
            used_u: res_u > floor_u,
            used_v: res_v > floor_v,
        });
    }
    let e_u = loglog_slope(samples.iter().filter(|s| s.used_u).map(|s| (s.mean_v, s.res_u)));
    let e_v = loglog_slope(samples.iter().filter(|s| s.used_v).map(|s| (s.mean_v, s.res_v)));
    Ok(LazutkinFit { e_u, e_v, samples, seed })
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn loglog_slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
