//! Points, displacement vectors and sampling regions in chart coordinates.

use serde::{Deserialize, Serialize};

/// A point of the annulus chart. `theta` is understood modulo the chart
/// circumference; `s` is the strip coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub theta: f64,
    pub s: f64,
}

impl Point {
    pub fn new(theta: f64, s: f64) -> Self {
        Self { theta, s }
    }
}

/// A chart-coordinate displacement (d_theta uses the locally unwrapped
/// theta difference).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub d_theta: f64,
    pub d_s: f64,
}

impl Vec2 {
    pub fn new(d_theta: f64, d_s: f64) -> Self {
        Self { d_theta, d_s }
    }

    pub fn norm(&self) -> f64 {
        self.d_theta.hypot(self.d_s)
    }
}

/// A round disk in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub center: Point,
    pub radius: f64,
}

impl DiskSpec {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }
}

/// An axis-aligned ellipse in chart coordinates; the round disk is the
/// special case of equal semi-axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipseSpec {
    pub center: Point,
    pub semi_theta: f64,
    pub semi_s: f64,
}

impl EllipseSpec {
    pub fn new(center: Point, semi_theta: f64, semi_s: f64) -> Self {
        Self {
            center,
            semi_theta,
            semi_s,
        }
    }

    /// Chart-coordinate area (not yet weighted by the area form).
    pub fn chart_area(&self) -> f64 {
        std::f64::consts::PI * self.semi_theta * self.semi_s
    }
}

impl From<DiskSpec> for EllipseSpec {
    fn from(d: DiskSpec) -> Self {
        EllipseSpec::new(d.center, d.radius, d.radius)
    }
}

/// An axis-aligned rectangle `[theta_lo, theta_hi] x [s_lo, s_hi]` contained
/// in a single chart period (no wrap across the seam).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectSpec {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl RectSpec {
    pub fn new(theta_lo: f64, theta_hi: f64, s_lo: f64, s_hi: f64) -> Self {
        Self {
            theta_lo,
            theta_hi,
            s_lo,
            s_hi,
        }
    }

    pub fn chart_area(&self) -> f64 {
        (self.theta_hi - self.theta_lo) * (self.s_hi - self.s_lo)
    }
}

/// A sampling region: either an ellipse (disks included) or a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Ellipse(EllipseSpec),
    Rect(RectSpec),
}

impl Region {
    pub fn chart_area(&self) -> f64 {
        match self {
            Region::Ellipse(e) => e.chart_area(),
            Region::Rect(r) => r.chart_area(),
        }
    }
}

impl From<DiskSpec> for Region {
    fn from(d: DiskSpec) -> Self {
        Region::Ellipse(d.into())
    }
}

impl From<EllipseSpec> for Region {
    fn from(e: EllipseSpec) -> Self {
        Region::Ellipse(e)
    }
}

impl From<RectSpec> for Region {
    fn from(r: RectSpec) -> Self {
        Region::Rect(r)
    }
}
