//! Wire billiards: the chord-reflection dynamical system on closed curves in Rⁿ.
//!
//! A chord [γ(x), γ(y)] reflects at γ(y) into [γ(y), γ(z)] when both chords make
//! equal angles with the tangent γ̇(y), equivalently when the chord length
//! L(x, y) + L(y, z) is critical in y.

pub mod caustics;
pub mod chord;
pub mod curve;
pub mod ellipsoid;
pub mod error;
pub mod phase;
pub mod quadrature;
pub mod reflection;
pub mod roots;
pub mod util;

pub use chord::{chord_frame, phase_area, ChordFrame};
pub use curve::{Curve, CurveKind, CurvePoint, CurveSpec};
pub use error::{Error, Result};
pub use reflection::{check_nice, iterate_orbit, jacobian_check, reflect, NicenessReport, Orbit, PhasePoint, ReflectMode};
