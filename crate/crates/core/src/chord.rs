//! The generating function L(x, y) = |γ(y) − γ(x)|, its partials and the chord angles.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::quadrature::gl10;
use crate::util::forward;

/// Chords closer to the diagonal than this fraction of |γ| report cos φ = 1.
pub const DIAGONAL_LIMIT: f64 = 1e-4;

/// Scalar data of the oriented chord from γ(x) to γ(y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordFrame {
    pub x: f64,
    pub y: f64,
    pub l: f64,
    pub cos_alpha: f64,
    pub cos_beta: f64,
    pub sin_alpha: f64,
    pub sin_beta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub l1: f64,
    pub l2: f64,
    pub l11: f64,
    pub l12: f64,
    pub l22: f64,
    /// Cosine of the angle between the planes π_xy and π_yx; `None` for tangent chords.
    pub cos_phi: Option<f64>,
}

impl ChordFrame {
    /// Builds the frame from `[γ, γ̇, γ̈]` at both ends.
    ///
    /// `near_diagonal` selects the osculating-plane limit cos φ = 1.
    pub fn from_derivatives(x: f64, y: f64, dx: &[DVector<f64>], dy: &[DVector<f64>], near_diagonal: bool) -> Self {
        Self::with_chord(x, y, &dy[0] - &dx[0], dx, dy, near_diagonal)
    }

    /// As [`ChordFrame::from_derivatives`] with the chord vector supplied, e.g. from
    /// [`Curve::chord_vector`] for short chords.
    pub fn with_chord(x: f64, y: f64, r: DVector<f64>, dx: &[DVector<f64>], dy: &[DVector<f64>], near_diagonal: bool) -> Self {
        let l = r.norm();
        let e = &r / l;
        let (tx, ty) = (&dx[1], &dy[1]);
        let cos_alpha = tx.dot(&e);
        let cos_beta = ty.dot(&e);
        // perpendicular parts keep sin accurate for glancing chords
        let sin_alpha = (tx - &e * cos_alpha).norm();
        let sin_beta = (ty - &e * cos_beta).norm();
        let l11 = (sin_alpha * sin_alpha - dx[2].dot(&r)) / l;
        let l22 = (sin_beta * sin_beta + dy[2].dot(&r)) / l;
        let l12 = (-(tx.dot(ty)) * l * l + tx.dot(&r) * ty.dot(&r)) / (l * l * l);
        let sines = sin_alpha * sin_beta;
        let cos_phi = if near_diagonal {
            Some(1.0)
        } else if sines < 1e-12 {
            None
        } else {
            Some((l * l12 / sines).clamp(-1.0, 1.0))
        };
        Self {
            x,
            y,
            l,
            cos_alpha,
            cos_beta,
            sin_alpha,
            sin_beta,
            alpha: sin_alpha.atan2(cos_alpha),
            beta: sin_beta.atan2(cos_beta),
            l1: -cos_alpha,
            l2: cos_beta,
            l11,
            l12,
            l22,
            cos_phi,
        }
    }
}

/// Arc-length separation of x and y: cyclic on closed curves.
pub(crate) fn separation(curve: &Curve, x: f64, y: f64) -> f64 {
    if curve.is_closed() {
        let d = forward(x, y, curve.length());
        d.min(curve.length() - d)
    } else {
        (y - x).abs()
    }
}

/// All chord data at `(x, y)`.
pub fn chord_frame(curve: &Curve, x: f64, y: f64) -> Result<ChordFrame> {
    let x = curve.reduce(x)?;
    let y = curve.reduce(y)?;
    let dx = curve.derivatives(x, 2);
    let dy = curve.derivatives(y, 2);
    let r = curve.chord_vector(x, y);
    if r.norm() < 1e-9 * curve.length() {
        return Err(Error::DiagonalChord { x, y });
    }
    let near = separation(curve, x, y) < DIAGONAL_LIMIT * curve.length();
    Ok(ChordFrame::with_chord(x, y, r, &dx, &dy, near))
}

/// Angle between the unit vector `t` and the vector `r`, accurate for small angles.
pub(crate) fn angle_to(t: &DVector<f64>, r: &DVector<f64>) -> f64 {
    let e = r / r.norm();
    let c = t.dot(&e);
    let s = (t - &e * c).norm();
    s.atan2(c)
}

/// Chord angles `(α, β)` and length, using the cancellation-free chord vector.
pub fn chord_angles(curve: &Curve, x: f64, y: f64) -> (f64, f64, f64) {
    let r = curve.chord_vector(x, y);
    let alpha = angle_to(&curve.tangent(x), &r);
    let beta = angle_to(&curve.tangent(y), &r);
    (alpha, beta, r.norm())
}

/// Chord length only.
pub fn chord_length(curve: &Curve, x: f64, y: f64) -> f64 {
    curve.chord_vector(x, y).norm()
}

/// Outcome of [`phase_area`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseArea {
    pub area: f64,
    /// Relative change between the last two refinements.
    pub relative_change: f64,
    pub grid: usize,
}

/// Total area of the chord cylinder for ω = sin α dα∧dx = |L₁₂| dx∧dy.
///
/// Periodic trapezoid rule in x and composite 10-point Gauss–Legendre in the
/// forward separation d = y − x, refined once by doubling.
pub fn phase_area(curve: &Curve, grid: usize) -> Result<PhaseArea> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    if grid < 128 {
        return Err(Error::arg("grid", format!("must be at least 128, got {grid}")));
    }
    let coarse = area_estimate(curve, grid);
    let fine = area_estimate(curve, 2 * grid);
    let relative_change = ((fine - coarse) / fine).abs();
    if relative_change > 1e-3 || !fine.is_finite() {
        return Err(Error::NotConverged {
            op: "phase_area",
            detail: format!("relative change {relative_change:e} between grids {grid} and {}", 2 * grid),
        });
    }
    Ok(PhaseArea {
        area: fine,
        relative_change,
        grid: 2 * grid,
    })
}

fn area_estimate(curve: &Curve, grid: usize) -> f64 {
    let len = curve.length();
    let hx = len / grid as f64;
    let panels = grid.div_ceil(10).max(8);
    let hd = len / panels as f64;
    let rule = gl10();
    let rows: f64 = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * hx;
            let dx = curve.derivatives(x, 2);
            let mut row = 0.0;
            for p in 0..panels {
                let a = p as f64 * hd;
                row += rule.integrate(a, a + hd, |d| {
                    let dy = curve.derivatives(x + d, 2);
                    ChordFrame::from_derivatives(x, x + d, &dx, &dy, false).l12.abs()
                });
            }
            row
        })
        .sum();
    rows * hx
}
