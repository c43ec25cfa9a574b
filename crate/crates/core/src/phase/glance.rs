use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lazutkin::{loglog_slope, v_coordinate};
use crate::chord::chord_frame;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::reflection::{iterate_orbit, iterate_orbit_all_roots, solve_chord, Orbit, PhasePoint, Reflector};

/// α-excursion of a glancing orbit.
#[derive(Debug, Clone, Serialize)]
pub struct GlanceReport {
    pub x0: f64,
    pub alpha0: f64,
    pub steps: usize,
    pub max_alpha: f64,
    pub min_alpha: f64,
    /// First step with α > 10·α₀.
    pub escape_step: Option<usize>,
    pub multivalued_steps: Vec<usize>,
    pub stopped_early: bool,
    pub max_residual: f64,
}

/// Iterates the orbit leaving γ(x0) at angle `alpha0` with the all-roots solver,
/// taking the successor nearest in step length where several exist.
pub fn glancing_escape(curve: &Curve, x0: f64, alpha0: f64, steps: usize) -> Result<(GlanceReport, Orbit)> {
    let y0 = solve_chord(curve, x0, alpha0, None)?;
    let reflector = Reflector::new(curve);
    let orbit = iterate_orbit_all_roots(&reflector, PhasePoint::new(x0, y0), steps)?;
    let max_alpha = orbit.alpha.iter().copied().fold(f64::MIN, f64::max);
    let min_alpha = orbit.alpha.iter().copied().fold(f64::MAX, f64::min);
    let escape_step = orbit.alpha.iter().position(|&a| a > 10.0 * alpha0);
    let report = GlanceReport {
        x0,
        alpha0,
        steps: orbit.steps(),
        max_alpha,
        min_alpha,
        escape_step,
        multivalued_steps: orbit.multivalued_steps.clone(),
        stopped_early: orbit.stopped_early,
        max_residual: orbit.max_residual(),
    };
    Ok((report, orbit))
}

/// Smallest `L₁₁(q, z) + L₂₂(w, q)` over random chords through γ(q).
///
/// Where k(q) = 0 both terms reduce to sin²/L and the sum is positive.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompanionCheck {
    pub q: f64,
    pub curvature: f64,
    pub samples: usize,
    pub min_sum: f64,
    /// Largest deviation of the sum from `sin²α/L + sin²β/L`.
    pub max_identity_error: f64,
}

pub fn companion_check(curve: &Curve, q: f64, samples: usize, seed: u64) -> Result<CompanionCheck> {
    if samples == 0 {
        return Err(Error::arg("samples", "must be positive"));
    }
    let len = curve.length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_sum, mut max_err) = (f64::INFINITY, 0.0f64);
    for _ in 0..samples {
        let z = q + rng.gen_range(0.02..0.98) * len;
        let w = q + rng.gen_range(0.02..0.98) * len;
        let out = chord_frame(curve, q, z)?;
        let inn = chord_frame(curve, w, q)?;
        let sum = out.l11 + inn.l22;
        let flat = out.sin_alpha.powi(2) / out.l + inn.sin_beta.powi(2) / inn.l;
        min_sum = min_sum.min(sum);
        max_err = max_err.max((sum - flat).abs());
    }
    Ok(CompanionCheck {
        q,
        curvature: curve.curvature(q),
        samples,
        min_sum,
        max_identity_error: max_err,
    })
}

/// Largest drift of the Lazutkin v along nice orbits started at several v₀.
#[derive(Debug, Clone, Serialize)]
pub struct BandConfinement {
    pub v0: Vec<f64>,
    pub max_drift: Vec<f64>,
    /// Log-log slope of drift against v₀; `None` when every drift is at round-off.
    pub exponent: Option<f64>,
    pub steps: usize,
}

/// Orbits start at `x0` with `v(x0, α₀) = v₀`.
pub fn band_confinement(curve: &Curve, x0: f64, v0s: &[f64], steps: usize) -> Result<BandConfinement> {
    let k0 = curve.curvature(x0);
    let mut drifts = Vec::with_capacity(v0s.len());
    for &v0 in v0s {
        let s = v0 * k0.powf(1.0 / 3.0);
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::arg("v0", format!("{v0} is not a valid Lazutkin v at x0")));
        }
        let alpha0 = 2.0 * s.asin();
        let y0 = solve_chord(curve, x0, alpha0, None)?;
        let orbit = iterate_orbit(curve, PhasePoint::new(x0, y0), steps)?;
        let drift = orbit
            .points
            .iter()
            .zip(&orbit.alpha)
            .map(|(p, &a)| (v_coordinate(curve, p.x, a) - v0).abs())
            .fold(0.0, f64::max);
        drifts.push(drift);
    }
    let floor = 1e3 * f64::EPSILON;
    let exponent = loglog_slope(v0s.iter().copied().zip(drifts.iter().copied()).filter(|&(_, d)| d > floor));
    Ok(BandConfinement {
        v0: v0s.to_vec(),
        max_drift: drifts,
        exponent,
        steps,
    })
}
