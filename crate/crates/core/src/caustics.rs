//! Striction curves and caustics of chord families.
//!
//! A family of chords `[γ(t), γ(f(t))]` sweeps the ruled surface
//! `S(t, s) = γ(t) + s·R(t)` with `R(t) = γ(f(t)) − γ(t)`. Everything here is
//! written with dot products only, so it holds in any dimension.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chord::angle_to;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::reflection::Orbit;
use crate::roots::{brent, Tolerance};
use crate::util::forward;

/// Rulings with `|R ∧ Ṙ|` below this are treated as cylindrical.
pub const CYLINDRICAL: f64 = 1e-10;

/// The partner map t ↦ f(t) of a chord family, in arc length.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Partner {
    /// `f(x) = x(t(x) + d)`: a shift by `d` in the raw parameter.
    RawShift { d: f64 },
    /// `f(x) = x + ψ(x)` with ψ a trigonometric polynomial of period |γ|.
    Fourier {
        period: f64,
        mean: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
        /// RMS misfit on the data that produced the fit.
        rms: f64,
    },
}

/// A sampled chord family.
#[derive(Debug, Clone, Serialize)]
pub struct ChordFamily {
    pub partner: Partner,
    pub grid: Vec<f64>,
}

impl ChordFamily {
    /// Family of a raw-parameter shift, sampled at `samples` equally spaced points.
    pub fn raw_shift(curve: &Curve, d: f64, samples: usize) -> Result<Self> {
        if !curve.is_closed() {
            return Err(Error::OpenCurve);
        }
        let period = curve.raw_period();
        let d = crate::util::wrap(d, period);
        if d < 1e-9 * period || period - d < 1e-9 * period {
            return Err(Error::arg("d", "shift must not be a multiple of the period"));
        }
        Self::sampled(curve, Partner::RawShift { d }, samples)
    }

    /// Family of an invariant circle, reconstructed from one long orbit on it.
    ///
    /// The forward step ψ = f(x) − x is fitted by least squares with `modes`
    /// harmonics; the orbit should be long enough to sample the circle densely.
    pub fn from_orbit(curve: &Curve, orbit: &Orbit, modes: usize, samples: usize) -> Result<Self> {
        if !curve.is_closed() {
            return Err(Error::OpenCurve);
        }
        let rows = orbit.points.len();
        let cols = 2 * modes + 1;
        if rows < 4 * cols {
            return Err(Error::arg("orbit", format!("{rows} chords are too few for {modes} harmonics")));
        }
        let len = curve.length();
        let w = std::f64::consts::TAU / len;
        let mut a = DMatrix::zeros(rows, cols);
        let mut b = DVector::zeros(rows);
        for (i, p) in orbit.points.iter().enumerate() {
            a[(i, 0)] = 1.0;
            for k in 1..=modes {
                let (s, c) = (k as f64 * w * p.x).sin_cos();
                a[(i, 2 * k - 1)] = c;
                a[(i, 2 * k)] = s;
            }
            b[i] = forward(p.x, p.y, len);
        }
        let coef = a
            .clone()
            .svd(true, true)
            .solve(&b, 1e-13)
            .map_err(|e| Error::Geometry(format!("partner fit: {e}")))?;
        let rms = ((&a * &coef - &b).norm_squared() / rows as f64).sqrt();
        let partner = Partner::Fourier {
            period: len,
            mean: coef[0],
            cos: (1..=modes).map(|k| coef[2 * k - 1]).collect(),
            sin: (1..=modes).map(|k| coef[2 * k]).collect(),
            rms,
        };
        Self::sampled(curve, partner, samples)
    }

    fn sampled(curve: &Curve, partner: Partner, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::arg("samples", "must be positive"));
        }
        let len = curve.length();
        let grid: Vec<f64> = (0..samples).map(|i| i as f64 * len / samples as f64).collect();
        let family = Self { partner, grid };
        if let Some(&x) = family.grid.iter().find(|&&x| family.derivative(curve, x) <= 0.0) {
            return Err(Error::Geometry(format!("partner map is not increasing at x = {x}")));
        }
        Ok(family)
    }

    /// f(x), unwrapped so that `x < f(x) < x + |γ|`.
    pub fn partner(&self, curve: &Curve, x: f64) -> f64 {
        match &self.partner {
            Partner::RawShift { d } => {
                let t = curve.t_of_x(x).expect("closed curve");
                let turns = (x / curve.length()).floor();
                let base = turns * curve.length() + curve.x_of_t(t);
                let mut y = turns * curve.length() + curve.x_of_t(t + d);
                // x_of_t(t) may round to just below a turn boundary
                while y <= x {
                    y += curve.length();
                }
                y + (x - base)
            }
            Partner::Fourier { .. } => x + self.step(x).0,
        }
    }

    /// f'(x).
    pub fn derivative(&self, curve: &Curve, x: f64) -> f64 {
        match &self.partner {
            Partner::RawShift { d } => {
                let t = curve.t_of_x(x).expect("closed curve");
                curve.raw_speed(t + d) / curve.raw_speed(t)
            }
            Partner::Fourier { .. } => 1.0 + self.step(x).1,
        }
    }

    /// ψ(x) and ψ'(x) of a Fourier partner.
    fn step(&self, x: f64) -> (f64, f64) {
        let Partner::Fourier { period, mean, cos, sin, .. } = &self.partner else {
            unreachable!("step is only used for fitted partners")
        };
        let w = std::f64::consts::TAU / period;
        let (mut v, mut dv) = (*mean, 0.0);
        for (k, (c, s)) in cos.iter().zip(sin).enumerate() {
            let kw = (k + 1) as f64 * w;
            let (sn, cs) = (kw * x).sin_cos();
            v += c * cs + s * sn;
            dv += kw * (s * cs - c * sn);
        }
        (v, dv)
    }

    /// f⁻¹(y) by Newton iteration.
    pub fn inverse(&self, curve: &Curve, y: f64) -> f64 {
        if let Partner::RawShift { d } = &self.partner {
            let t = curve.t_of_x(y).expect("closed curve");
            let turns = (y / curve.length()).floor();
            let mut x = turns * curve.length() + curve.x_of_t(t - d) + (y - turns * curve.length() - curve.x_of_t(t));
            while x >= y {
                x -= curve.length();
            }
            return x;
        }
        let mut x = y - self.step(y).0;
        for _ in 0..50 {
            let r = self.partner(curve, x) - y;
            let dx = r / self.derivative(curve, x);
            x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) {
                break;
            }
        }
        x
    }

    /// RMS misfit of the partner fit (zero for exact shifts).
    pub fn fit_rms(&self) -> f64 {
        match &self.partner {
            Partner::RawShift { .. } => 0.0,
            Partner::Fourier { rms, .. } => *rms,
        }
    }
}

/// Striction data of one chord of the family.
#[derive(Debug, Clone, Serialize)]
pub struct StrictionSample {
    pub t: f64,
    pub point: Vec<f64>,
    /// Position of the striction point as a fraction of the chord, s*/L.
    pub s_ratio: f64,
    /// Angle between the ruling and the striction curve's velocity, in [0, π/2].
    pub deviation: Option<f64>,
    /// `(|R|²|Ṙ|² − (R·Ṙ)²)^{1/2}`.
    pub non_cylindricity: f64,
    pub chord_length: f64,
}

struct Ruling {
    base: DVector<f64>,
    r: DVector<f64>,
    s_ratio: f64,
    gram: f64,
}

fn ruling(curve: &Curve, family: &ChordFamily, x: f64) -> Ruling {
    let y = family.partner(curve, x);
    let r = curve.chord_vector(x, y);
    let tx = curve.tangent(x);
    let rdot = curve.tangent(y) * family.derivative(curve, x) - &tx;
    let (rr, pp, rp) = (r.norm_squared(), rdot.norm_squared(), r.dot(&rdot));
    let gram = (rr * pp - rp * rp).max(0.0);
    let s_ratio = (r.dot(&tx) * rp - rr * rdot.dot(&tx)) / gram;
    Ruling {
        base: curve.position(x),
        r,
        s_ratio,
        gram,
    }
}

/// Striction point δ(x) = γ(x) + (s*/L)·R(x).
pub fn striction_point(curve: &Curve, family: &ChordFamily, x: f64) -> DVector<f64> {
    let g = ruling(curve, family, x);
    &g.base + &g.r * g.s_ratio
}

/// Five-point central derivative of δ, halving the step until the deviation it
/// produces settles.
fn striction_velocity(curve: &Curve, family: &ChordFamily, x: f64, r: &DVector<f64>) -> (DVector<f64>, f64) {
    let mut h = 1e-3 * curve.length();
    let mut last: Option<(DVector<f64>, f64)> = None;
    for _ in 0..6 {
        let p = |k: f64| striction_point(curve, family, x + k * h);
        let v = (p(-2.0) - p(-1.0) * 8.0 + p(1.0) * 8.0 - p(2.0)) / (12.0 * h);
        let dev = line_angle(&v, r);
        if let Some((_, prev)) = &last {
            if (dev - prev).abs() <= 0.01 * dev + 1e-13 {
                return (v, dev);
            }
        }
        last = Some((v, dev));
        h *= 0.5;
    }
    last.expect("at least one refinement")
}

/// Angle between the lines spanned by `v` and `r`.
fn line_angle(v: &DVector<f64>, r: &DVector<f64>) -> f64 {
    let a = angle_to(&(v / v.norm()), r);
    a.min(std::f64::consts::PI - a)
}

/// Striction samples over the family grid.
pub fn striction_profile(curve: &Curve, family: &ChordFamily) -> Vec<StrictionSample> {
    use rayon::prelude::*;
    family
        .grid
        .par_iter()
        .map(|&x| {
            let g = ruling(curve, family, x);
            let non_cylindricity = g.gram.sqrt();
            let point = &g.base + &g.r * g.s_ratio;
            let deviation = (non_cylindricity > CYLINDRICAL).then(|| striction_velocity(curve, family, x, &g.r).1);
            StrictionSample {
                t: x,
                point: point.iter().copied().collect(),
                s_ratio: g.s_ratio,
                deviation,
                non_cylindricity,
                chord_length: g.r.norm(),
            }
        })
        .collect()
}

/// Roots of `tan(m d/2) = m tan(d/2)` in (0, 2π).
///
/// Each continuity branch between consecutive poles of either tangent is scanned
/// for sign changes, which are then polished by Brent's method.
pub fn gutkin_roots(m: u32) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::arg("m", format!("must be at least 2, got {m}")));
    }
    let mf = m as f64;
    let g = |d: f64| (mf * d / 2.0).tan() - mf * (d / 2.0).tan();
    let tau = std::f64::consts::TAU;
    let mut cuts: Vec<f64> = (0..m).map(|k| (2 * k + 1) as f64 * std::f64::consts::PI / mf).collect();
    cuts.push(std::f64::consts::PI);
    cuts.push(0.0);
    cuts.push(tau);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let tol = Tolerance {
        ftol: 0.0,
        xtol: 1e-15,
        ..Tolerance::default()
    };
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let margin = 1e-9 * (w[1] - w[0]);
        let (a, b) = (w[0] + margin, w[1] - margin);
        let cells = 4096;
        let h = (b - a) / cells as f64;
        let mut prev = (a, g(a));
        for i in 1..=cells {
            let d = a + i as f64 * h;
            let cur = (d, g(d));
            if prev.1 == 0.0 {
                roots.push(prev.0);
            } else if prev.1.signum() != cur.1.signum() && cur.1 != 0.0 {
                if let Ok(r) = brent(g, prev.0, cur.0, prev.1, cur.1, tol) {
                    roots.push(r);
                }
            }
            prev = cur;
        }
    }
    roots.retain(|&d| d > 1e-6 && d < tau - 1e-6);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(roots)
}

/// Outcome of [`string_invariant`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StringCheck {
    pub max_residual: f64,
    /// Largest |(a₁ + a₂)'| seen, for scale.
    pub max_rate: f64,
    pub used: usize,
    pub excluded: usize,
}

/// Checks `(a₁ + a₂)' = δ₂'·v₂ − δ₁'·v₁` at each grid point γ(t), with δ₁, δ₂ the
/// striction points of the incoming and outgoing chords and a₁, a₂ their
/// distances to γ(t). Derivatives are five-point central differences in t.
pub fn string_invariant(curve: &Curve, family: &ChordFamily) -> StringCheck {
    struct Split {
        a: f64,
        d1: DVector<f64>,
        d2: DVector<f64>,
        v1: DVector<f64>,
        v2: DVector<f64>,
        cylindrical: bool,
    }
    let at = |t: f64| {
        let back = family.inverse(curve, t);
        let g1 = ruling(curve, family, back);
        let g2 = ruling(curve, family, t);
        let (l1, l2) = (g1.r.norm(), g2.r.norm());
        Split {
            a: (1.0 - g1.s_ratio) * l1 + g2.s_ratio * l2,
            d1: &g1.base + &g1.r * g1.s_ratio,
            d2: &g2.base + &g2.r * g2.s_ratio,
            v1: &g1.r / l1,
            v2: &g2.r / l2,
            cylindrical: g1.gram.sqrt() <= CYLINDRICAL || g2.gram.sqrt() <= CYLINDRICAL,
        }
    };
    let h = 1e-3 * curve.length();
    let (mut worst, mut rate, mut used, mut excluded) = (0.0f64, 0.0f64, 0, 0);
    for &t in &family.grid {
        let s = [at(t - 2.0 * h), at(t - h), at(t + h), at(t + 2.0 * h)];
        let centre = at(t);
        if centre.cylindrical || s.iter().any(|p| p.cylindrical) {
            excluded += 1;
            continue;
        }
        let fd = |f: &dyn Fn(&Split) -> f64| (f(&s[0]) - 8.0 * f(&s[1]) + 8.0 * f(&s[2]) - f(&s[3])) / (12.0 * h);
        let fdv = |f: &dyn Fn(&Split) -> &DVector<f64>| (f(&s[0]) - f(&s[1]) * 8.0 + f(&s[2]) * 8.0 - f(&s[3])) / (12.0 * h);
        let lhs = fd(&|p| p.a);
        let rhs = fdv(&|p| &p.d2).dot(&centre.v2) - fdv(&|p| &p.d1).dot(&centre.v1);
        worst = worst.max((lhs - rhs).abs());
        rate = rate.max(lhs.abs());
        used += 1;
    }
    StringCheck {
        max_residual: worst,
        max_rate: rate,
        used,
        excluded,
    }
}
