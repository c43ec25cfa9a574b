//! Near-boundary analysis: Lazutkin coordinates, rotation numbers, inscribed
//! polygons and glancing orbits.

mod glance;
mod lazutkin;
mod measure;
mod polygon;
mod rotation;

pub use glance::{band_confinement, companion_check, glancing_escape, BandConfinement, CompanionCheck, GlanceReport};
pub use lazutkin::{lazutkin_chart, lazutkin_residuals, LazutkinChart, LazutkinFit, LazutkinSample};
pub use measure::CumulativeMeasure;
pub use polygon::{
    deficit_limit, impact_discrepancy, longest_inscribed_polygon, periodic_orbit_search, DeficitResult, Polygon,
    POLYGON_RESIDUAL,
};
pub use rotation::{rotation_number, RotationNumber, MAX_DENOMINATOR, RATIONAL_TOLERANCE};
