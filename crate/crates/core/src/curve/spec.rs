use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a curve, serialized as a JSON object tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub kind: CurveKind,
    /// Ambient dimension. Defaults to the smallest dimension the kind lives in;
    /// planar kinds are padded with zero coordinates when it is larger.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default = "default_closed")]
    pub closed: bool,
    /// Fourier modes added to the raw parameterization, for perturbation studies.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub perturbation: Vec<FourierMode>,
}

fn default_closed() -> bool {
    true
}

/// Adds `cos·cos(kτ) + sin·sin(kτ)` with τ the raw parameter rescaled to [0, 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: u32,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveKind {
    Circle {
        radius: f64,
    },
    /// `(a cos t, b sin t)`.
    PlanarEllipse {
        a: f64,
        b: f64,
    },
    /// Convex curve with support function
    /// `h(θ) = radius + Σ cos[j]·cos((j+1)θ) + sin[j]·sin((j+1)θ)`.
    FourierConvex {
        radius: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// `(cos t, sin t, ε cos mt, ε sin mt)` in R⁴.
    Coil {
        epsilon: f64,
        m: u32,
    },
    /// Orbit `exp(At)·seed_point` of a one-parameter subgroup of SO(n).
    SubgroupOrbit {
        matrix: Vec<Vec<f64>>,
        seed_point: Vec<f64>,
        /// Raw period; detected from the spectrum of `A` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<f64>,
    },
    /// Planar convex curve of length 2π·scale with curvature `1 − cos 2s`
    /// (s the unit-scale arc length), flat at s = 0 and s = π.
    FlatPoint {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// Arcs of the circles (cos u, sin u, 0, 0) and (0, 0, −cos u, −sin u) in R⁴,
    /// kept on |u| ≤ half_width and |u − π| ≤ half_width and blended smoothly between.
    OrthogonalCircles {
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    /// Closed curve through the given points, traversed in order, interpolated
    /// trigonometrically at equally spaced parameters.
    RawSamples {
        points: Vec<Vec<f64>>,
    },
}

fn unit() -> f64 {
    1.0
}

fn default_half_width() -> f64 {
    0.6
}

impl CurveKind {
    fn name(&self) -> &'static str {
        match self {
            CurveKind::Circle { .. } => "circle",
            CurveKind::PlanarEllipse { .. } => "planar-ellipse",
            CurveKind::FourierConvex { .. } => "fourier-convex",
            CurveKind::Coil { .. } => "coil",
            CurveKind::SubgroupOrbit { .. } => "subgroup-orbit",
            CurveKind::FlatPoint { .. } => "flat-point",
            CurveKind::OrthogonalCircles { .. } => "orthogonal-circles",
            CurveKind::RawSamples { .. } => "raw-samples",
        }
    }

    /// Smallest ambient dimension the kind can be realized in.
    pub fn natural_dimension(&self) -> usize {
        match self {
            CurveKind::Circle { .. }
            | CurveKind::PlanarEllipse { .. }
            | CurveKind::FourierConvex { .. }
            | CurveKind::FlatPoint { .. } => 2,
            CurveKind::Coil { .. } | CurveKind::OrthogonalCircles { .. } => 4,
            CurveKind::SubgroupOrbit { matrix, .. } => matrix.len(),
            CurveKind::RawSamples { points } => points.first().map_or(0, Vec::len),
        }
    }
}

impl CurveSpec {
    pub fn new(kind: CurveKind) -> Self {
        Self {
            kind,
            dimension: None,
            closed: true,
            perturbation: Vec::new(),
        }
    }

    pub fn circle(radius: f64) -> Self {
        Self::new(CurveKind::Circle { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::new(CurveKind::PlanarEllipse { a, b })
    }

    pub fn coil(epsilon: f64, m: u32) -> Self {
        Self::new(CurveKind::Coil { epsilon, m })
    }

    pub fn flat_point() -> Self {
        Self::new(CurveKind::FlatPoint { scale: 1.0 })
    }

    pub fn with_dimension(mut self, n: usize) -> Self {
        self.dimension = Some(n);
        self
    }

    pub fn with_perturbation(mut self, modes: Vec<FourierMode>) -> Self {
        self.perturbation = modes;
        self
    }

    pub fn kind_name(&self) -> &'static str {
        self.kind.name()
    }

    /// Ambient dimension after defaults are applied.
    pub fn dim(&self) -> usize {
        self.dimension.unwrap_or_else(|| self.kind.natural_dimension())
    }

    /// Checks the invariants that can be verified without building the curve.
    pub fn validate(&self) -> Result<()> {
        let natural = self.kind.natural_dimension();
        let n = self.dim();
        if n < 2 {
            return Err(Error::spec("dimension", format!("must be at least 2, got {n}")));
        }
        let fixed = matches!(
            self.kind,
            CurveKind::SubgroupOrbit { .. } | CurveKind::RawSamples { .. }
        );
        if fixed && n != natural {
            return Err(Error::spec(
                "dimension",
                format!("{} data is {natural}-dimensional but dimension is {n}", self.kind_name()),
            ));
        }
        if n < natural {
            return Err(Error::spec(
                "dimension",
                format!("{} needs dimension at least {natural}, got {n}", self.kind_name()),
            ));
        }
        positive_finite_checks(&self.kind)?;
        match &self.kind {
            CurveKind::Coil { epsilon, m } => {
                if *m < 2 {
                    return Err(Error::spec("m", format!("coil needs m >= 2, got {m}")));
                }
                if !(0.0..1.0).contains(epsilon) {
                    return Err(Error::spec("epsilon", format!("coil needs 0 <= epsilon < 1, got {epsilon}")));
                }
            }
            CurveKind::SubgroupOrbit { matrix, seed_point, period } => {
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != matrix.len() {
                        return Err(Error::spec(
                            format!("matrix[{i}]"),
                            format!("row has {} entries, matrix has {} rows", row.len(), matrix.len()),
                        ));
                    }
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(Error::spec(format!("matrix[{i}]"), "non-finite entry"));
                    }
                }
                for i in 0..matrix.len() {
                    for j in 0..matrix.len() {
                        let s = matrix[i][j] + matrix[j][i];
                        if s.abs() > 1e-12 {
                            return Err(Error::spec(
                                format!("matrix[{i}][{j}]"),
                                format!("matrix is not skew-symmetric (A + Aᵀ = {s:e})"),
                            ));
                        }
                    }
                }
                if seed_point.len() != matrix.len() {
                    return Err(Error::spec(
                        "seed_point",
                        format!("has {} entries, matrix is {}x{}", seed_point.len(), matrix.len(), matrix.len()),
                    ));
                }
                if let Some(p) = period {
                    if !(p.is_finite() && *p > 0.0) {
                        return Err(Error::spec("period", format!("must be positive, got {p}")));
                    }
                }
            }
            CurveKind::OrthogonalCircles { half_width } => {
                if !(*half_width > 0.0 && *half_width < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::spec("half_width", format!("must lie in (0, π/2), got {half_width}")));
                }
            }
            CurveKind::RawSamples { points } => {
                if points.len() < 8 {
                    return Err(Error::spec("points", format!("need at least 8 samples, got {}", points.len())));
                }
                for (i, p) in points.iter().enumerate() {
                    if p.len() != natural {
                        return Err(Error::spec(
                            format!("points[{i}]"),
                            format!("has {} coordinates, expected {natural}", p.len()),
                        ));
                    }
                    if p.iter().any(|v| !v.is_finite()) {
                        return Err(Error::spec(format!("points[{i}]"), "non-finite coordinate"));
                    }
                }
                if !self.closed {
                    return Err(Error::spec("closed", "raw-samples curves must be closed"));
                }
            }
            _ => {}
        }
        for (i, mode) in self.perturbation.iter().enumerate() {
            if mode.k == 0 {
                return Err(Error::spec(format!("perturbation[{i}].k"), "mode number must be positive"));
            }
            for (name, v) in [("cos", &mode.cos), ("sin", &mode.sin)] {
                if !v.is_empty() && v.len() != n {
                    return Err(Error::spec(
                        format!("perturbation[{i}].{name}"),
                        format!("has {} entries, dimension is {n}", v.len()),
                    ));
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::spec(format!("perturbation[{i}].{name}"), "non-finite entry"));
                }
            }
        }
        Ok(())
    }
}

fn positive_finite_checks(kind: &CurveKind) -> Result<()> {
    let check = |field: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::spec(field, format!("must be positive and finite, got {v}")))
        }
    };
    match kind {
        CurveKind::Circle { radius } => check("radius", *radius),
        CurveKind::PlanarEllipse { a, b } => check("a", *a).and(check("b", *b)),
        CurveKind::FourierConvex { radius, cos, sin } => {
            check("radius", *radius)?;
            for (name, v) in [("cos", cos), ("sin", sin)] {
                if let Some(i) = v.iter().position(|c| !c.is_finite()) {
                    return Err(Error::spec(format!("{name}[{i}]"), "non-finite coefficient"));
                }
            }
            Ok(())
        }
        CurveKind::FlatPoint { scale } => check("scale", *scale),
        CurveKind::Coil { epsilon, .. } if !epsilon.is_finite() => {
            Err(Error::spec("epsilon", "must be finite"))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_uses_kind_tag() {
        let spec: CurveSpec = serde_json::from_str(r#"{"kind":"coil","epsilon":0.05,"m":2}"#).unwrap();
        assert_eq!(spec, CurveSpec::coil(0.05, 2));
        assert_eq!(spec.dim(), 4);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains(r#""kind":"coil""#));
    }

    #[test]
    fn coil_with_small_m_is_rejected() {
        let err = CurveSpec::coil(0.05, 1).validate().unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { ref field, .. } if field == "m"));
    }

    #[test]
    fn non_skew_matrix_names_entry() {
        let spec = CurveSpec::new(CurveKind::SubgroupOrbit {
            matrix: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            seed_point: vec![1.0, 0.0],
            period: None,
        });
        let err = spec.validate().unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { ref field, .. } if field == "matrix[0][1]"));
    }

    #[test]
    fn planar_kind_can_be_embedded() {
        let spec = CurveSpec::circle(1.0).with_dimension(3);
        spec.validate().unwrap();
        assert!(CurveSpec::coil(0.1, 2).with_dimension(3).validate().is_err());
    }
}
