//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point (theta {theta}, s {s}) lies outside the chart strip")]
    OutOfStrip { theta: f64, s: f64 },

    #[error("point (theta {theta}, s {s}) lies on the chart boundary")]
    BoundaryPoint { theta: f64, s: f64 },

    #[error("maps live on different charts")]
    ChartMismatch,

    #[error("orbit escaped the chart at (theta {theta}, s {s}), t = {t}")]
    OrbitEscape { theta: f64, s: f64, t: f64 },

    #[error("field is not constant on the {which} boundary row (spread {spread:.3e})")]
    BoundaryNotLevel { which: &'static str, spread: f64 },

    #[error("field has nonzero boundary rows (max |value| = {max_abs:.3e})")]
    NotCompactlySupported { max_abs: f64 },

    #[error("percentile parameter h = {h} outside [0, 1]")]
    PercentileRange { h: f64 },

    #[error("capped evaluation needs a unit-area chart (total area {total})")]
    NotUnitArea { total: f64 },

    #[error("difference formula {difference} disagrees with percentile value {percentile}")]
    PercentileMismatch { difference: f64, percentile: f64 },

    #[error("region is not invariant under the map (boundary deviation {distance:.3e})")]
    RegionNotInvariant { distance: f64 },

    #[error("rotation numbers disagree across the region (spread {spread:.3e})")]
    RotationInconsistent { spread: f64 },

    #[error("displacement field vanishes near the sampling circle (min magnitude {min_magnitude:.3e})")]
    WindingMargin { min_magnitude: f64 },

    #[error("fixed-point refinement did not converge (best residual {residual:.3e})")]
    RefinementFailed { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
