use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::reflection::Orbit;
use crate::util::{forward, rationalize};

/// Largest denominator tried by the rational detection.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
/// Agreement required between ρ and a convergent.
pub const RATIONAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RotationNumber {
    /// The orbit closes after q chords having wound p times.
    Rational { p: i64, q: u64, value: f64 },
    Irrational { value: f64 },
}

impl RotationNumber {
    pub fn value(&self) -> f64 {
        match *self {
            RotationNumber::Rational { value, .. } | RotationNumber::Irrational { value } => value,
        }
    }
}

/// Mean forward advance per chord as a fraction of |γ|.
///
/// A convergent p/q within [`RATIONAL_TOLERANCE`] is accepted only if the orbit
/// actually returns to its starting chord after q steps.
pub fn rotation_number(curve: &Curve, orbit: &Orbit) -> Result<RotationNumber> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let chords = orbit.points.len();
    if chords < 100 {
        return Err(Error::arg("orbit", format!("needs at least 100 chords, got {chords}")));
    }
    let len = curve.length();
    let advance: f64 = orbit.points.iter().map(|p| forward(p.x, p.y, len)).sum();
    let value = advance / (len * chords as f64);
    let max_den = MAX_DENOMINATOR.min(chords as u64 - 1);
    if let Some((p, q)) = rationalize(value, max_den, RATIONAL_TOLERANCE) {
        let (start, back) = (orbit.points[0], orbit.points[q as usize]);
        let gap = |a: f64, b: f64| {
            let d = forward(a, b, len);
            d.min(len - d)
        };
        if gap(start.x, back.x).max(gap(start.y, back.y)) <= 1e-8 * len {
            return Ok(RotationNumber::Rational { p, q, value });
        }
    }
    Ok(RotationNumber::Irrational { value })
}
