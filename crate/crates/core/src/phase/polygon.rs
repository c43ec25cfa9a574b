use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::measure::CumulativeMeasure;
use crate::chord::{chord_angles, ChordFrame, DIAGONAL_LIMIT};
use crate::curve::Curve;
use crate::error::{Error, Result};

/// Gradient level at which the optimizer stops.
const GRADIENT_TOL: f64 = 1e-13;
/// Reflection residual a converged polygon must meet.
pub const POLYGON_RESIDUAL: f64 = 1e-10;
const MAX_ITER: usize = 200;

/// A critical inscribed polygon: an open chain with fixed ends or a closed cycle.
#[derive(Debug, Clone, Serialize)]
pub struct Polygon {
    /// Unwrapped arc-length vertices in increasing order. A closed polygon lists its
    /// q vertices once; the last chord joins `vertices[q−1]` to `vertices[0] + p·|γ|`.
    pub vertices: Vec<f64>,
    pub closed: bool,
    /// Number of turns around the curve (closed polygons), 0 for chains.
    pub winding: usize,
    /// Total chord length.
    pub length: f64,
    /// Arc length spanned minus chord length, summed chord by chord.
    pub deficit: f64,
    /// `|cos β(x_{i−1}, x_i) − cos α(x_i, x_{i+1})|` at each free vertex.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl Polygon {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Free vertices: the interior of a chain, all vertices of a cycle.
    pub fn free_vertices(&self) -> &[f64] {
        if self.closed {
            &self.vertices
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }
}

/// Chain `[a, z…, b]` or cycle `[z…, z₀ + p|γ|]`.
#[derive(Clone, Copy)]
enum Shape {
    Chain { a: f64, b: f64 },
    Cycle { span: f64 },
}

impl Shape {
    fn vertices(self, z: &DVector<f64>) -> Vec<f64> {
        match self {
            Shape::Chain { a, b } => std::iter::once(a).chain(z.iter().copied()).chain(std::iter::once(b)).collect(),
            Shape::Cycle { span } => z.iter().copied().chain(std::iter::once(z[0] + span)).collect(),
        }
    }
}

struct Evaluation {
    length: f64,
    deficit: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

fn evaluate(curve: &Curve, shape: Shape, z: &DVector<f64>) -> Evaluation {
    let vs = shape.vertices(z);
    let derivs: Vec<_> = vs.iter().map(|&x| curve.derivatives(x, 2)).collect();
    let near = DIAGONAL_LIMIT * curve.length();
    let frames: Vec<ChordFrame> = (0..vs.len() - 1)
        .map(|i| {
            let r = curve.chord_vector(vs[i], vs[i + 1]);
            ChordFrame::with_chord(vs[i], vs[i + 1], r, &derivs[i], &derivs[i + 1], vs[i + 1] - vs[i] < near)
        })
        .collect();
    let m = z.len();
    let mut gradient = DVector::zeros(m);
    let mut hessian = DMatrix::zeros(m, m);
    // chord c joins free vertices idx(c) and idx(c + 1), where they are free
    let index = |v: usize| -> Option<usize> {
        match shape {
            Shape::Chain { .. } => (v >= 1 && v <= m).then(|| v - 1),
            Shape::Cycle { .. } => Some(v % m),
        }
    };
    for (c, f) in frames.iter().enumerate() {
        let (i, j) = (index(c), index(c + 1));
        if let Some(i) = i {
            gradient[i] += f.l1;
            hessian[(i, i)] += f.l11;
        }
        if let Some(j) = j {
            gradient[j] += f.l2;
            hessian[(j, j)] += f.l22;
        }
        if let (Some(i), Some(j)) = (i, j) {
            hessian[(i, j)] += f.l12;
            hessian[(j, i)] += f.l12;
        }
    }
    Evaluation {
        length: frames.iter().map(|f| f.l).sum(),
        deficit: frames.iter().map(|f| (f.y - f.x) - f.l).sum(),
        gradient,
        hessian,
    }
}

fn ordered(shape: Shape, z: &DVector<f64>, len: f64) -> bool {
    let vs = shape.vertices(z);
    vs.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] < len)
}

/// Levenberg–Marquardt-damped Newton ascent on the total chord length.
fn maximize(curve: &Curve, shape: Shape, mut z: DVector<f64>, op: &'static str) -> Result<(DVector<f64>, Evaluation, usize)> {
    let len = curve.length();
    let mut eval = evaluate(curve, shape, &z);
    let scale = eval.hessian.diagonal().amax().max(1e-300);
    let mu_floor = 1e-9 * scale;
    let mut mu = mu_floor;
    for iter in 0..MAX_ITER {
        if eval.gradient.amax() < GRADIENT_TOL {
            return Ok((z, eval, iter));
        }
        let system = DMatrix::identity(z.len(), z.len()) * mu - &eval.hessian;
        let Some(chol) = system.cholesky() else {
            mu = (mu * 10.0).max(1e-6 * scale);
            continue;
        };
        let step = chol.solve(&eval.gradient);
        let trial = &z + &step;
        if !ordered(shape, &trial, len) {
            mu *= 10.0;
            continue;
        }
        let next = evaluate(curve, shape, &trial);
        if next.length >= eval.length - 4.0 * f64::EPSILON * eval.length {
            let stalled = step.amax() <= 4.0 * f64::EPSILON * len;
            z = trial;
            eval = next;
            mu = (mu / 10.0).max(mu_floor);
            if stalled {
                break;
            }
        } else {
            mu *= 10.0;
        }
        if mu > 1e20 * scale {
            break;
        }
    }
    let worst = eval.gradient.amax();
    if worst < POLYGON_RESIDUAL {
        Ok((z, eval, MAX_ITER))
    } else {
        Err(Error::NotConverged {
            op,
            detail: format!("largest reflection residual {worst:e} after {MAX_ITER} iterations"),
        })
    }
}

/// Positions dividing `[start, start + span]` into `parts` pieces of equal k^{2/3}
/// measure (equal arc length where the measure vanishes identically).
fn measure_spacing(curve: &Curve, start: f64, span: f64, targets: &[f64]) -> Vec<f64> {
    let panels = (4 * targets.len()).clamp(64, 4096);
    let measure = CumulativeMeasure::new(curve, start, start + span, panels);
    let total = measure.total();
    targets
        .iter()
        .map(|&f| {
            if total > 0.0 {
                measure.inverse(curve, f * total)
            } else {
                start + f * span
            }
        })
        .collect()
}

fn residuals(curve: &Curve, vs: &[f64], free: impl Iterator<Item = usize>) -> Vec<f64> {
    free.map(|i| {
        let (_, b, _) = chord_angles(curve, vs[i - 1], vs[i]);
        let (a, _, _) = chord_angles(curve, vs[i], vs[i + 1]);
        (b.cos() - a.cos()).abs()
    })
    .collect()
}

/// Longest chain from γ(x_start) to γ(x_end) with `n` interior vertices strictly
/// inside the arc.
///
/// Interior vertices start at equal k^{2/3}-measure spacing and are refined by
/// damped Newton ascent. At the maximum every interior vertex obeys the
/// reflection law.
pub fn longest_inscribed_polygon(curve: &Curve, x_start: f64, x_end: f64, n: usize) -> Result<Polygon> {
    if n == 0 {
        return Err(Error::arg("n", "need at least one interior vertex"));
    }
    let len = curve.length();
    let span = x_end - x_start;
    let limit = if curve.is_closed() { len } else { len - x_start };
    if !(span > 0.0 && span <= limit) || (!curve.is_closed() && x_start < 0.0) {
        return Err(Error::arg("x_end", format!("arc [{x_start}, {x_end}] is empty or exceeds the curve")));
    }
    let targets: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
    let z0 = DVector::from_vec(measure_spacing(curve, x_start, span, &targets));
    let shape = Shape::Chain { a: x_start, b: x_end };
    let (z, eval, iterations) = maximize(curve, shape, z0, "longest_inscribed_polygon")?;
    let vertices = shape.vertices(&z);
    let residuals = residuals(curve, &vertices, 1..=n);
    Ok(Polygon {
        vertices,
        closed: false,
        winding: 0,
        length: eval.length,
        deficit: eval.deficit,
        residuals,
        iterations,
    })
}

/// Scaled deficits and their extrapolation.
#[derive(Debug, Clone, Serialize)]
pub struct DeficitResult {
    pub ns: Vec<usize>,
    /// `ℓ − ℓ_n`.
    pub deficits: Vec<f64>,
    /// `n²(ℓ − ℓ_n)`.
    pub scaled_by_vertices: Vec<f64>,
    /// `N²(ℓ − ℓ_n)` with N = n + 1 chords; the extrapolated sequence.
    pub scaled_by_chords: Vec<f64>,
    /// Richardson estimates `c₀` of `c₀ + c₁/N²` from consecutive pairs.
    pub richardson: Vec<f64>,
    /// Changes between consecutive Richardson estimates.
    pub richardson_changes: Vec<f64>,
    pub limit: f64,
    pub arc_length: f64,
    /// `∫ k^{2/3} dx` over the arc.
    pub measure: f64,
    /// `(1/24)(∫ k^{2/3})³`.
    pub reference_cubed: f64,
    /// `(1/24)∫ k^{2/3}`, the uncubed form.
    pub reference_uncubed: f64,
}

/// Deficit of the longest inscribed chains for each n, extrapolated in 1/N².
pub fn deficit_limit(curve: &Curve, x_start: f64, x_end: f64, ns: &[usize]) -> Result<DeficitResult> {
    if ns.len() < 2 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("ns", "need at least two increasing vertex counts"));
    }
    let results: Vec<Result<Polygon>> = ns
        .par_iter()
        .map(|&n| longest_inscribed_polygon(curve, x_start, x_end, n))
        .collect();
    let mut polygons = Vec::with_capacity(ns.len());
    for (&n, r) in ns.iter().zip(results) {
        match r {
            Ok(p) => polygons.push(p),
            Err(e) => {
                let done: Vec<String> = polygons
                    .iter()
                    .zip(ns)
                    .map(|(p, n)| format!("n={n}: deficit {:e}", p.deficit))
                    .collect();
                return Err(Error::NotConverged {
                    op: "deficit_limit",
                    detail: format!("n={n}: {e}; completed [{}]", done.join(", ")),
                });
            }
        }
    }
    let deficits: Vec<f64> = polygons.iter().map(|p| p.deficit).collect();
    let scaled_by_vertices: Vec<f64> = ns.iter().zip(&deficits).map(|(&n, d)| (n * n) as f64 * d).collect();
    let chords: Vec<f64> = ns.iter().map(|&n| (n + 1) as f64).collect();
    let scaled_by_chords: Vec<f64> = chords.iter().zip(&deficits).map(|(c, d)| c * c * d).collect();
    let richardson: Vec<f64> = (1..ns.len())
        .map(|i| {
            let (a, b) = (chords[i - 1].powi(2), chords[i].powi(2));
            (b * scaled_by_chords[i] - a * scaled_by_chords[i - 1]) / (b - a)
        })
        .collect();
    let richardson_changes = richardson.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let measure = CumulativeMeasure::new(curve, x_start, x_end, 512).total();
    Ok(DeficitResult {
        ns: ns.to_vec(),
        deficits,
        scaled_by_vertices,
        scaled_by_chords,
        limit: *richardson.last().expect("two or more n"),
        richardson,
        richardson_changes,
        arc_length: x_end - x_start,
        measure,
        reference_cubed: measure.powi(3) / 24.0,
        reference_uncubed: measure / 24.0,
    })
}

/// Kolmogorov–Smirnov distance between the interior vertices of a chain and the
/// normalized k^{2/3} measure of its arc.
pub fn impact_discrepancy(curve: &Curve, polygon: &Polygon) -> Result<f64> {
    if polygon.closed {
        return Err(Error::arg("polygon", "impact discrepancy needs an open chain"));
    }
    let (a, b) = (polygon.vertices[0], *polygon.vertices.last().expect("chain ends"));
    let measure = CumulativeMeasure::new(curve, a, b, 1024);
    let total = measure.total();
    let interior = polygon.free_vertices();
    let n = interior.len() as f64;
    Ok(interior
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = measure.value(curve, x) / total;
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max))
}

/// Perimeter-maximizing closed q-gon winding p times around the curve.
///
/// Fails with [`Error::CollapsedWinding`] when the maximizer repeats a shorter
/// polygon or merges vertices.
pub fn periodic_orbit_search(curve: &Curve, p: usize, q: usize) -> Result<Polygon> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    if q < 2 || p == 0 || p >= q {
        return Err(Error::arg("p", format!("need q ≥ 2 and 0 < p < q, got p={p}, q={q}")));
    }
    let len = curve.length();
    let span = p as f64 * len;
    let targets: Vec<f64> = (0..q).map(|i| (i * p) as f64 / q as f64).collect();
    let measure = CumulativeMeasure::new(curve, 0.0, len, 1024);
    let total = measure.total();
    let z0 = DVector::from_iterator(
        q,
        targets.iter().map(|&f| {
            let turns = f.floor();
            turns * len + measure.inverse(curve, (f - turns) * total)
        }),
    );
    let shape = Shape::Cycle { span };
    let (z, eval, iterations) = maximize(curve, shape, z0, "periodic_orbit_search")?;
    let vertices: Vec<f64> = z.iter().copied().collect();
    if let Some(period) = collapse_period(&vertices, p, len) {
        return Err(Error::CollapsedWinding { p, q, period });
    }
    let mut closed = vertices.clone();
    closed.insert(0, vertices[q - 1] - span);
    closed.push(vertices[0] + span);
    let residuals = residuals(curve, &closed, 1..=q);
    Ok(Polygon {
        vertices,
        closed: true,
        winding: p,
        length: eval.length,
        deficit: eval.deficit,
        residuals,
        iterations,
    })
}

/// Smallest period r < q with vertices repeating after r steps, or the number of
/// distinct vertices when some of them merge.
fn collapse_period(vs: &[f64], p: usize, len: f64) -> Option<usize> {
    let q = vs.len();
    let tol = 1e-6 * len;
    let span = p as f64 * len;
    let at = |i: usize| vs[i % q] + (i / q) as f64 * span;
    for r in (1..q).filter(|r| q.is_multiple_of(*r)) {
        let shift = at(r) - at(0);
        let turns = (shift / len).round();
        if (shift - turns * len).abs() < tol && (0..q).all(|i| (at(i + r) - at(i) - shift).abs() < tol) {
            return Some(r);
        }
    }
    let mut reduced: Vec<f64> = vs.iter().map(|&x| crate::util::wrap(x, len)).collect();
    reduced.sort_by(f64::total_cmp);
    let distinct = reduced.windows(2).filter(|w| w[1] - w[0] > tol).count() + 1;
    (distinct < q).then_some(distinct)
}
