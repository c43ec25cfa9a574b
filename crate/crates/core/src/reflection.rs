//! The wire billiard map: reflection solver, niceness certificate, orbits and
//! the area-preservation check.

use std::borrow::Cow;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::chord::{angle_to, chord_angles, ChordFrame, DIAGONAL_LIMIT};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::roots::{brent, golden_min, Tolerance};
use crate::util::forward;

/// Default number of scan cells for the all-roots solver.
pub const DEFAULT_CELLS: usize = 1024;
/// Successors closer to y than this fraction of |γ| are ignored by the scan.
pub const EXCLUSION: f64 = 1e-4;
/// Defaults used when niceness is certified lazily.
pub const DEFAULT_NICE_GRID: usize = 128;
pub const DEFAULT_NICE_MARGIN: f64 = 1e-3;
/// Line-to-curve distances below this count as extra intersections.
pub const WITNESS_DISTANCE: f64 = 1e-7;

/// An oriented chord from γ(x) to γ(y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectMode {
    /// Every successor found by the grid scan.
    AllRoots,
    /// The unique successor of a nice curve.
    Nice,
}

/// Positions on an equally spaced arc-length grid, shared by all scans.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    pub xs: Vec<f64>,
    pub positions: Vec<DVector<f64>>,
}

impl ScanGrid {
    pub fn new(curve: &Curve, cells: usize) -> Self {
        let h = curve.length() / cells as f64;
        let xs: Vec<f64> = (0..cells).map(|i| i as f64 * h).collect();
        let positions = xs.par_iter().map(|&x| curve.position(x)).collect();
        Self { xs, positions }
    }

    fn spacing(&self, length: f64) -> f64 {
        length / self.xs.len() as f64
    }
}

impl Curve {
    pub(crate) fn scan_grid(&self) -> &ScanGrid {
        self.scan.get_or_init(|| ScanGrid::new(self, DEFAULT_CELLS))
    }

    /// Niceness report with the default grid and margin, computed once.
    pub fn niceness(&self) -> &NicenessReport {
        self.niceness
            .get_or_init(|| check_nice(self, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN))
    }

    /// Installs a report computed with non-default settings. Returns false if a
    /// report was already cached.
    pub fn certify(&self, report: NicenessReport) -> bool {
        self.niceness.set(report).is_ok()
    }
}

/// Reflection solver bound to one curve and scan grid.
#[derive(Debug)]
pub struct Reflector<'a> {
    curve: &'a Curve,
    grid: Cow<'a, ScanGrid>,
}

impl<'a> Reflector<'a> {
    /// Uses the curve's cached grid of [`DEFAULT_CELLS`] cells.
    pub fn new(curve: &'a Curve) -> Self {
        Self {
            curve,
            grid: Cow::Borrowed(curve.scan_grid()),
        }
    }

    pub fn with_cells(curve: &'a Curve, cells: usize) -> Result<Self> {
        if cells < DEFAULT_CELLS {
            return Err(Error::arg("cells", format!("need at least {DEFAULT_CELLS} scan cells, got {cells}")));
        }
        if cells == DEFAULT_CELLS {
            return Ok(Self::new(curve));
        }
        Ok(Self {
            curve,
            grid: Cow::Owned(ScanGrid::new(curve, cells)),
        })
    }

    pub fn curve(&self) -> &'a Curve {
        self.curve
    }

    pub fn reflect(&self, p: PhasePoint, mode: ReflectMode) -> Result<Vec<f64>> {
        if !self.curve.is_closed() {
            return Err(Error::OpenCurve);
        }
        match mode {
            ReflectMode::AllRoots => self.all_roots(p),
            ReflectMode::Nice => {
                let report = self.curve.niceness();
                if !report.pass {
                    return Err(Error::NotNice(report.summary()));
                }
                self.nice_root(p).map(|z| vec![z])
            }
        }
    }

    /// All successors z of the chord (x, y), sorted by forward distance from y.
    pub fn all_roots(&self, p: PhasePoint) -> Result<Vec<f64>> {
        let curve = self.curve;
        let len = curve.length();
        let (_, beta, l) = chord_angles(curve, p.x, p.y);
        if l < 1e-9 * len {
            return Err(Error::DiagonalChord { x: p.x, y: p.y });
        }
        let y = curve.reduce(p.y)?;
        let cos_beta = beta.cos();
        let ty = curve.tangent(y);
        let gy = curve.position(y);
        let excl = EXCLUSION * len;

        // forward distances of the scan nodes, with the excluded ends added
        let cells = self.grid.xs.len();
        let h = self.grid.spacing(len);
        let first = ((y / h).floor() as usize + 1) % cells;
        let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(cells + 2);
        let h_of = |delta: f64| angle_to(&ty, &curve.chord_vector(y, y + delta)) - beta;
        nodes.push((excl, cos_beta - (beta + h_of(excl)).cos()));
        for k in 0..cells {
            let idx = (first + k) % cells;
            let delta = forward(y, self.grid.xs[idx], len);
            if delta <= excl || delta >= len - excl {
                continue;
            }
            let r = &self.grid.positions[idx] - &gy;
            let g = cos_beta - ty.dot(&r) / r.norm();
            nodes.push((delta, g));
        }
        let end = len - excl;
        nodes.push((end, cos_beta - (beta + h_of(end)).cos()));

        let zero = 1e-14;
        let tol = Tolerance {
            ftol: 0.0,
            xtol: 0.0,
            max_iter: 200,
        };
        let mut roots = Vec::new();
        for i in 0..nodes.len() {
            let (d0, g0) = nodes[i];
            if g0.abs() <= zero {
                roots.push(d0);
                continue;
            }
            let Some(&(d1, g1)) = nodes.get(i + 1) else { break };
            if g1.abs() <= zero || g0.signum() == g1.signum() {
                continue;
            }
            let (ha, hb) = (h_of(d0), h_of(d1));
            if ha.signum() == hb.signum() {
                continue;
            }
            if let Ok(d) = brent(h_of, d0, d1, ha, hb, tol) {
                let z = y + d;
                let resid = (cos_beta - angle_to(&ty, &curve.chord_vector(y, z)).cos()).abs();
                if resid <= 1e-10 {
                    roots.push(d);
                }
            }
        }
        Ok(roots.into_iter().map(|d| crate::util::wrap(y + d, len)).collect())
    }

    /// The unique successor on a nice curve, using monotonicity of α(y, ·).
    ///
    /// No niceness check is made here; see [`Reflector::reflect`].
    pub fn nice_root(&self, p: PhasePoint) -> Result<f64> {
        let curve = self.curve;
        let len = curve.length();
        let (_, beta, l) = chord_angles(curve, p.x, p.y);
        if l < 1e-9 * len {
            return Err(Error::DiagonalChord { x: p.x, y: p.y });
        }
        let y = curve.reduce(p.y)?;
        let guess = forward(p.x, y, len);
        let d = solve_forward(curve, y, beta, guess)?;
        Ok(crate::util::wrap(y + d, len))
    }
}

/// Finds δ ∈ (0, |γ|) with α(x, x + δ) = `alpha`, assuming α(x, ·) increases.
fn solve_forward(curve: &Curve, x: f64, alpha: f64, guess: f64) -> Result<f64> {
    let len = curve.length();
    let tx = curve.tangent(x);
    let h = |d: f64| angle_to(&tx, &curve.chord_vector(x, x + d)) - alpha;
    let floor = 1e-13 * len;
    let mut d = guess.clamp(floor, len - floor);
    let mut hd = h(d);
    let (mut lo, mut hlo, mut hi, mut hhi);
    if hd < 0.0 {
        (lo, hlo) = (d, hd);
        loop {
            d = 0.5 * (d + len);
            hd = h(d);
            if hd >= 0.0 {
                (hi, hhi) = (d, hd);
                break;
            }
            (lo, hlo) = (d, hd);
            if len - d < floor {
                return Err(Error::NoRoot(format!("α(x, ·) stays below {alpha} up to the end of the curve")));
            }
        }
    } else {
        (hi, hhi) = (d, hd);
        loop {
            d *= 0.5;
            hd = h(d);
            if hd <= 0.0 {
                (lo, hlo) = (d, hd);
                break;
            }
            (hi, hhi) = (d, hd);
            if d < floor {
                return Err(Error::NoRoot(format!("α(x, ·) stays above {alpha} down to the diagonal")));
            }
        }
    }
    let tol = Tolerance {
        ftol: 0.0,
        xtol: 0.0,
        max_iter: 200,
    };
    brent(h, lo, hi, hlo, hhi, tol)
}

/// Arc length y with α(x, y) = `alpha`, searching forward from `x`.
///
/// `guess` is a forward distance; the default is the circle estimate 2α/k(x).
pub fn solve_chord(curve: &Curve, x: f64, alpha: f64, guess: Option<f64>) -> Result<f64> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(Error::arg("alpha", format!("must lie in (0, π), got {alpha}")));
    }
    let len = curve.length();
    let guess = guess.unwrap_or_else(|| {
        let k = curve.curvature(x);
        if k > 1e-8 {
            (2.0 * alpha / k).min(0.5 * len)
        } else {
            0.25 * len
        }
    });
    let d = solve_forward(curve, x, alpha, guess)?;
    Ok(crate::util::wrap(x + d, len))
}

/// Successors of `p` on `curve`.
pub fn reflect(curve: &Curve, p: PhasePoint, mode: ReflectMode) -> Result<Vec<f64>> {
    Reflector::new(curve).reflect(p, mode)
}

/// A finite piece of a billiard trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct Orbit {
    pub points: Vec<PhasePoint>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub lengths: Vec<f64>,
    /// `|cos β(x_{i−1}, x_i) − cos α(x_i, y_i)|`; zero for the initial chord.
    pub residuals: Vec<f64>,
    /// Set when a step found no successor and the orbit was cut short.
    pub stopped_early: bool,
    /// Steps where more than one successor existed.
    pub multivalued_steps: Vec<usize>,
}

impl Orbit {
    fn start(curve: &Curve, p0: PhasePoint) -> Result<Self> {
        let p0 = PhasePoint::new(curve.reduce(p0.x)?, curve.reduce(p0.y)?);
        let (a, b, l) = chord_angles(curve, p0.x, p0.y);
        if l < 1e-9 * curve.length() {
            return Err(Error::DiagonalChord { x: p0.x, y: p0.y });
        }
        Ok(Self {
            points: vec![p0],
            alpha: vec![a],
            beta: vec![b],
            lengths: vec![l],
            residuals: vec![0.0],
            stopped_early: false,
            multivalued_steps: Vec::new(),
        })
    }

    fn push(&mut self, curve: &Curve, z: f64) {
        let last = *self.points.last().expect("orbit has a start");
        let next = PhasePoint::new(last.y, z);
        let (a, b, l) = chord_angles(curve, next.x, next.y);
        let prev_beta = *self.beta.last().expect("orbit has a start");
        self.residuals.push((prev_beta.cos() - a.cos()).abs());
        self.points.push(next);
        self.alpha.push(a);
        self.beta.push(b);
        self.lengths.push(l);
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Iterates the map of a nice curve for `steps` steps.
pub fn iterate_orbit(curve: &Curve, p0: PhasePoint, steps: usize) -> Result<Orbit> {
    let report = curve.niceness();
    if !report.pass {
        return Err(Error::NotNice(report.summary()));
    }
    let reflector = Reflector::new(curve);
    let mut orbit = Orbit::start(curve, p0)?;
    for step in 1..=steps {
        let last = *orbit.points.last().expect("orbit has a start");
        match reflector.nice_root(last) {
            Ok(z) => orbit.push(curve, z),
            Err(Error::NoRoot(_)) => {
                orbit.stopped_early = true;
                break;
            }
            Err(e) => return Err(e.at_step(step)),
        }
    }
    Ok(orbit)
}

/// Iterates with the all-roots solver, choosing among several successors the one
/// whose forward step is closest to the previous one.
pub fn iterate_orbit_all_roots(reflector: &Reflector<'_>, p0: PhasePoint, steps: usize) -> Result<Orbit> {
    if !reflector.curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let curve = reflector.curve;
    let len = curve.length();
    let mut orbit = Orbit::start(curve, p0)?;
    for step in 1..=steps {
        let last = *orbit.points.last().expect("orbit has a start");
        let roots = reflector.all_roots(last).map_err(|e| e.at_step(step))?;
        if roots.is_empty() {
            orbit.stopped_early = true;
            break;
        }
        if roots.len() > 1 {
            orbit.multivalued_steps.push(step);
        }
        let previous = forward(last.x, last.y, len);
        let z = roots
            .iter()
            .copied()
            .min_by(|a, b| {
                let da = (forward(last.y, *a, len) - previous).abs();
                let db = (forward(last.y, *b, len) - previous).abs();
                da.total_cmp(&db)
            })
            .expect("non-empty");
        orbit.push(curve, z);
    }
    Ok(orbit)
}

/// An extra near-intersection of a chord's line with the curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub distance: f64,
}

/// Numerical evidence for the three niceness conditions and the twist.
#[derive(Debug, Clone, Serialize)]
pub struct NicenessReport {
    pub grid: usize,
    pub margin: f64,
    /// Condition 2.
    pub min_curvature: f64,
    pub min_curvature_at: f64,
    pub max_curvature: f64,
    /// Condition 3, over the compactified cylinder (diagonal limit 1).
    pub min_cos_phi: f64,
    pub min_cos_phi_at: (f64, f64),
    /// Grid chords tangent at an end, where cos φ is undefined.
    pub tangent_chords: usize,
    /// min L·L₁₂ over off-diagonal grid chords.
    pub min_twist: f64,
    pub min_twist_at: (f64, f64),
    /// Condition 1: scale-free transversality 2·min(sin α, sin β)/(L·k_max).
    pub min_transversality: f64,
    pub witnesses: Vec<Witness>,
    pub line_condition: bool,
    pub curvature_condition: bool,
    pub plane_condition: bool,
    pub twist_condition: bool,
    pub pass: bool,
}

impl NicenessReport {
    pub fn summary(&self) -> String {
        let mut failed = Vec::new();
        if !self.line_condition {
            failed.push(format!(
                "line condition ({} witnesses, min transversality {:.3e})",
                self.witnesses.len(),
                self.min_transversality
            ));
        }
        if !self.curvature_condition {
            failed.push(format!("curvature condition (min k = {:.3e} at x = {:.6})", self.min_curvature, self.min_curvature_at));
        }
        if !self.plane_condition {
            failed.push(format!(
                "plane condition (min cos φ = {:.3e}, {} tangent chords)",
                self.min_cos_phi, self.tangent_chords
            ));
        }
        if !self.twist_condition {
            failed.push(format!("twist (min L·L12 = {:.3e})", self.min_twist));
        }
        if failed.is_empty() {
            "all conditions hold".into()
        } else {
            format!("failed: {}", failed.join("; "))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PairStats {
    min_cos_phi: (f64, f64, f64),
    tangent: usize,
    min_twist: (f64, f64, f64),
    min_sine: f64,
}

/// Checks Definition-style niceness on a `grid × grid` set of chords.
pub fn check_nice(curve: &Curve, grid: usize, margin: f64) -> NicenessReport {
    let len = curve.length();
    let grid = grid.max(8);

    // condition 2 on a fine grid, with the smallest sample refined
    let fine = (8 * grid).max(1024);
    let hk = len / fine as f64;
    let ks: Vec<f64> = (0..fine).into_par_iter().map(|i| curve.curvature(i as f64 * hk)).collect();
    let (imin, _) = ks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let max_curvature = ks.iter().copied().fold(0.0, f64::max);
    let mean_curvature = ks.iter().sum::<f64>() / fine as f64;
    let x0 = imin as f64 * hk;
    let (min_curvature_at, min_curvature) =
        golden_min(|x| curve.curvature(x), x0 - hk, x0 + hk, 1e-10 * len);
    let (min_curvature_at, min_curvature) = if min_curvature <= ks[imin] {
        (crate::util::wrap(min_curvature_at, len), min_curvature)
    } else {
        (x0, ks[imin])
    };

    // conditions 3 and twist on grid chords
    let h = len / grid as f64;
    let derivs: Vec<Vec<DVector<f64>>> = (0..grid).into_par_iter().map(|i| curve.derivatives(i as f64 * h, 2)).collect();
    let stats: Vec<PairStats> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let mut s = PairStats {
                min_cos_phi: (f64::INFINITY, 0.0, 0.0),
                tangent: 0,
                min_twist: (f64::INFINITY, 0.0, 0.0),
                min_sine: f64::INFINITY,
            };
            for j in 0..grid {
                if i == j {
                    continue;
                }
                let (x, y) = (i as f64 * h, j as f64 * h);
                let near = crate::chord::separation(curve, x, y) < DIAGONAL_LIMIT * len;
                let f = ChordFrame::from_derivatives(x, y, &derivs[i], &derivs[j], near);
                match f.cos_phi {
                    Some(c) if c < s.min_cos_phi.0 => s.min_cos_phi = (c, x, y),
                    Some(_) => {}
                    None => s.tangent += 1,
                }
                let twist = f.l * f.l12;
                if twist < s.min_twist.0 {
                    s.min_twist = (twist, x, y);
                }
                let sine = 2.0 * f.sin_alpha.min(f.sin_beta) / (f.l * max_curvature.max(f64::MIN_POSITIVE));
                s.min_sine = s.min_sine.min(sine);
            }
            s
        })
        .collect();
    let mut min_cos_phi = (1.0, 0.0, 0.0);
    let mut min_twist = (f64::INFINITY, 0.0, 0.0);
    let mut tangent_chords = 0;
    let mut min_transversality = f64::INFINITY;
    for s in &stats {
        if s.min_cos_phi.0 < min_cos_phi.0 {
            min_cos_phi = s.min_cos_phi;
        }
        if s.min_twist.0 < min_twist.0 {
            min_twist = s.min_twist;
        }
        tangent_chords += s.tangent;
        min_transversality = min_transversality.min(s.min_sine);
    }

    // condition 1: extra intersections of chord lines with the curve
    let scan = curve.scan_grid();
    let witnesses = line_witnesses(curve, scan, &derivs, h);

    let curvature_condition = min_curvature > 1e-6 * mean_curvature;
    let plane_condition = tangent_chords == 0 && min_cos_phi.0 > margin;
    let twist_condition = min_twist.0 > 0.0;
    let line_condition = witnesses.is_empty() && min_transversality > margin;
    NicenessReport {
        grid,
        margin,
        min_curvature,
        min_curvature_at,
        max_curvature,
        min_cos_phi: min_cos_phi.0,
        min_cos_phi_at: (min_cos_phi.1, min_cos_phi.2),
        tangent_chords,
        min_twist: min_twist.0,
        min_twist_at: (min_twist.1, min_twist.2),
        min_transversality,
        witnesses,
        line_condition,
        curvature_condition,
        plane_condition,
        twist_condition,
        pass: line_condition && curvature_condition && plane_condition && twist_condition,
    }
}

fn line_distance(p: &DVector<f64>, base: &DVector<f64>, dir: &DVector<f64>) -> f64 {
    let r = p - base;
    let along = r.dot(dir);
    (r - dir * along).norm()
}

fn line_witnesses(curve: &Curve, scan: &ScanGrid, derivs: &[Vec<DVector<f64>>], h: f64) -> Vec<Witness> {
    let len = curve.length();
    let cells = scan.xs.len();
    let hs = scan.spacing(len);
    let grid = derivs.len();
    (0..grid)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            let mut dist = vec![0.0; cells];
            for j in (i + 1)..grid {
                let (x, y) = (i as f64 * h, j as f64 * h);
                let base = &derivs[i][0];
                let r = &derivs[j][0] - base;
                let dir = &r / r.norm();
                for (k, p) in scan.positions.iter().enumerate() {
                    dist[k] = line_distance(p, base, &dir);
                }
                for k in 0..cells {
                    let t = scan.xs[k];
                    let near_end = crate::chord::separation(curve, t, x) < 2.0 * hs
                        || crate::chord::separation(curve, t, y) < 2.0 * hs;
                    if near_end {
                        continue;
                    }
                    let (prev, next) = (dist[(k + cells - 1) % cells], dist[(k + 1) % cells]);
                    if dist[k] >= 0.5 * hs || dist[k] > prev || dist[k] > next {
                        continue;
                    }
                    let (tm, dm) = golden_min(|s| line_distance(&curve.position(s), base, &dir), t - hs, t + hs, 1e-12 * len);
                    let (t_best, d_best) = if dm < dist[k] { (tm, dm) } else { (t, dist[k]) };
                    if d_best < WITNESS_DISTANCE {
                        found.push(Witness {
                            x,
                            y,
                            t: crate::util::wrap(t_best, len),
                            distance: d_best,
                        });
                    }
                }
            }
            found
        })
        .collect()
}

/// Determinant of the Jacobian of the map in coordinates (x, cos α), by central differences.
///
/// The map sends the chord (x, y) to (y, z); its new angle coordinate is
/// cos α(y, z) = cos β(x, y), so z itself is never needed.
pub fn jacobian_check(curve: &Curve, p: PhasePoint, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 0.1) {
        return Err(Error::arg("h", format!("finite-difference step must lie in (0, 0.1), got {h}")));
    }
    let (alpha, _, _) = chord_angles(curve, p.x, p.y);
    if alpha.sin() < 10.0 * h.sqrt() {
        return Err(Error::arg("p", format!("chord is too close to tangency for h = {h} (α = {alpha:e})")));
    }
    let len = curve.length();
    let c0 = alpha.cos();
    let guess = forward(p.x, p.y, len);
    let image = |x: f64, c: f64| -> Result<(f64, f64)> {
        let d = solve_forward(curve, x, c.clamp(-1.0, 1.0).acos(), guess)?;
        let (_, beta, _) = chord_angles(curve, x, x + d);
        Ok((x + d, beta.cos()))
    };
    let (xp, cp) = image(p.x + h, c0)?;
    let (xm, cm) = image(p.x - h, c0)?;
    let (xq, cq) = image(p.x, c0 + h)?;
    let (xr, cr) = image(p.x, c0 - h)?;
    let dydx = (xp - xm) / (2.0 * h);
    let dcdx = (cp - cm) / (2.0 * h);
    let dydc = (xq - xr) / (2.0 * h);
    let dcdc = (cq - cr) / (2.0 * h);
    Ok(dydx * dcdc - dydc * dcdx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSpec;
    use std::f64::consts::PI;

    #[test]
    fn circle_successor_doubles_arc() {
        let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
        let z = reflect(&c, PhasePoint::new(0.0, 0.7), ReflectMode::AllRoots).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - 1.4).abs() < 1e-12);
        let z = reflect(&c, PhasePoint::new(0.0, 0.7), ReflectMode::Nice).unwrap();
        assert!((z[0] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn circle_square_orbit_closes() {
        let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
        let o = iterate_orbit(&c, PhasePoint::new(0.0, PI / 2.0), 4).unwrap();
        let last = o.points[4];
        assert!(crate::util::forward(0.0, last.x, c.length()).min(c.length() - last.x) < 1e-10);
        assert!(o.max_residual() < 1e-12);
    }

    #[test]
    fn flat_point_is_not_nice() {
        let c = Curve::new(CurveSpec::flat_point()).unwrap();
        let r = check_nice(&c, 32, 1e-3);
        assert!(!r.curvature_condition);
        assert!(r.min_curvature < 1e-8);
        assert!(!r.pass);
    }

    #[test]
    fn circle_jacobian_is_one() {
        let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
        let det = jacobian_check(&c, PhasePoint::new(0.3, 1.5), 1e-5).unwrap();
        assert!((det - 1.0).abs() < 1e-8, "{det}");
    }
}
