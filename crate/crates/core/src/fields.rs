//! The concrete scalar-field profiles used by the stock scenarios and tests.
//!
//! All unit-chart shapes that need a large area are built as rectangles with
//! smooth ramps: a topological disk occupying most of a unit-area annulus
//! cannot be round in chart coordinates (the strip is too narrow), so the
//! disk is the annulus cut open along a theta slit.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{Point, RectSpec};
use crate::surface::{AnnulusChart, ScalarField};
use crate::util::smoothstep;

/// s-value below which the compact height profile is identically zero.
pub const HEIGHT_ZERO_BAND: f64 = 0.002;
/// The compact height profile equals `s` exactly on this sub-band.
pub const HEIGHT_LINEAR_LO: f64 = 0.006;
pub const HEIGHT_LINEAR_HI: f64 = 0.994;

/// Compactly supported height profile on the unit strip: zero collars at
/// both ends, the identity `s` on `[0.006, 0.994]`, hermite ramps between.
/// The top ramp folds back to zero so both boundary rows vanish; the fold
/// band carries less than 0.6% of the measure and sits above every
/// percentile the scenarios sample.
pub fn compact_height_profile(s: f64) -> f64 {
    if s <= HEIGHT_ZERO_BAND {
        0.0
    } else if s < HEIGHT_LINEAR_LO {
        HEIGHT_LINEAR_LO * smoothstep((s - HEIGHT_ZERO_BAND) / (HEIGHT_LINEAR_LO - HEIGHT_ZERO_BAND))
    } else if s <= HEIGHT_LINEAR_HI {
        s
    } else if s < 0.998 {
        HEIGHT_LINEAR_HI * smoothstep((0.998 - s) / (0.998 - HEIGHT_LINEAR_HI))
    } else {
        0.0
    }
}

/// The compact height field on the unit-area chart.
pub fn compact_height(n_theta: usize, n_s: usize) -> Result<ScalarField> {
    ScalarField::from_fn(AnnulusChart::unit_area(), n_theta, n_s, |_, s| {
        compact_height_profile(s)
    })
}

/// Pure height field `F(theta, s) = s` (not compactly supported).
pub fn linear_height(chart: AnnulusChart, n_theta: usize, n_s: usize) -> Result<ScalarField> {
    ScalarField::from_fn(chart, n_theta, n_s, |_, s| s)
}

// Plateau-bump geometry on the unit chart. The value-1 plateau is the
// rectangle [PLATEAU_SLIT, 2 pi - PLATEAU_SLIT] x [0.06, 0.94] of measure
// 0.8; the support is [SUPPORT_SLIT, 2 pi - SUPPORT_SLIT] x [0.02, 0.98] of
// measure 0.9. (Measure of a rectangle on this chart is
// (1 - slit/pi) * s_width.)
const SUPPORT_SLIT: f64 = PI * (1.0 - 0.9 / 0.96);
const PLATEAU_SLIT: f64 = PI * (1.0 - 0.8 / 0.88);
const SUPPORT_S_LO: f64 = 0.02;
const SUPPORT_S_HI: f64 = 0.98;
const PLATEAU_S_LO: f64 = 0.06;
const PLATEAU_S_HI: f64 = 0.94;

/// Measure of the plateau rectangle (the "big disk").
pub const PLATEAU_MEASURE: f64 = 0.8;
/// Measure of the support rectangle.
pub const SUPPORT_MEASURE: f64 = 0.9;

/// The rectangle on which the plateau bump equals 1.
pub fn plateau_rect() -> RectSpec {
    RectSpec::new(PLATEAU_SLIT, 2.0 * PI - PLATEAU_SLIT, PLATEAU_S_LO, PLATEAU_S_HI)
}

/// The support rectangle of the plateau bump.
pub fn support_rect() -> RectSpec {
    RectSpec::new(SUPPORT_SLIT, 2.0 * PI - SUPPORT_SLIT, SUPPORT_S_LO, SUPPORT_S_HI)
}

/// Center of the plateau (deep inside the big disk).
pub fn plateau_center() -> Point {
    Point::new(PI, 0.5)
}

fn edge_ramp(x: f64, zero_at: f64, one_at: f64) -> f64 {
    smoothstep((x - zero_at) / (one_at - zero_at))
}

/// Smoothed indicator of the big disk: 1 on the plateau rectangle
/// (measure 0.8), 0 outside the support rectangle (measure 0.9), a C1
/// product ramp in the collar. The gradient vanishes on the plateau
/// boundary, so the generated flow fixes the closed disk pointwise.
pub fn plateau_bump_value(theta: f64, s: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    let x = if t <= PI {
        edge_ramp(t, SUPPORT_SLIT, PLATEAU_SLIT)
    } else {
        edge_ramp(2.0 * PI - t, SUPPORT_SLIT, PLATEAU_SLIT)
    };
    let y = if s <= 0.5 {
        edge_ramp(s, SUPPORT_S_LO, PLATEAU_S_LO)
    } else {
        edge_ramp(1.0 - s, 1.0 - SUPPORT_S_HI, 1.0 - PLATEAU_S_HI)
    };
    x * y
}

/// The plateau bump sampled on the unit chart.
pub fn plateau_bump(n_theta: usize, n_s: usize) -> Result<ScalarField> {
    ScalarField::from_fn(AnnulusChart::unit_area(), n_theta, n_s, plateau_bump_value)
}

/// Terrace level of [`terraced_bump`]: the flat band sits at this value.
pub const TERRACE_LEVEL: f64 = 0.12;
const TERRACE_FLAT_LO: f64 = 0.12;
const TERRACE_FLAT_HI: f64 = 0.88;

/// A stem field with one interior maximum: a monotone terrace profile in
/// `s` (flat at [`TERRACE_LEVEL`] across the middle band) plus a smooth
/// rectangular bump of prescribed measure riding on the flat band. The
/// Reeb tree is a stem with a single branch whose measure equals the bump
/// support measure.
pub fn terraced_bump(n_theta: usize, n_s: usize, bump_measure: f64) -> Result<ScalarField> {
    assert!(
        (0.01..=0.71).contains(&bump_measure),
        "bump measure {bump_measure} outside the band that fits the terrace"
    );
    // support rectangle centered at (pi, 0.5) with slit fraction fixed at
    // 1/16: measure = (1 - slit/pi) * width = 0.9375 * width
    let width = bump_measure / 0.9375;
    let slit = PI / 16.0;
    let s_lo = 0.5 - width / 2.0;
    let s_hi = 0.5 + width / 2.0;
    debug_assert!(s_lo > TERRACE_FLAT_LO && s_hi < TERRACE_FLAT_HI);
    ScalarField::from_fn(AnnulusChart::unit_area(), n_theta, n_s, move |theta, s| {
        let terrace = if s <= TERRACE_FLAT_LO {
            s
        } else if s < TERRACE_FLAT_HI {
            TERRACE_LEVEL
        } else {
            s - (TERRACE_FLAT_HI - TERRACE_FLAT_LO)
        };
        let t = theta.rem_euclid(2.0 * PI);
        let x = if t <= PI {
            smoothstep((t - slit) / (PI - slit))
        } else {
            smoothstep((2.0 * PI - t - slit) / (PI - slit))
        };
        let y = if s <= 0.5 {
            smoothstep((s - s_lo) / (0.5 - s_lo))
        } else {
            smoothstep((s_hi - s) / (s_hi - 0.5))
        };
        terrace + x * y
    })
}

/// First integral of the wide-chart composed map: radial inside each of the
/// two unit disks (centers a half-turn apart), a function of `s` outside,
/// with a C1 collar blend. The function is exactly invariant under both the
/// half rotation (the two disk terms swap) and any twist supported in
/// either disk (the active term is radial there).
pub fn twist_lamination_value(chart: &AnnulusChart, disk_center: Point, theta: f64, s: f64) -> f64 {
    let half_turn = chart.circumference / 2.0;
    let r_a = chart.distance(Point::new(theta, s), disk_center);
    let r_b = chart.distance(
        Point::new(theta, s),
        Point::new(disk_center.theta + half_turn, disk_center.s),
    );
    // collar: weight 1 up to r = 0.92 (covers the twist support 0.9),
    // fading to 0 at r = 1.5; the two collars cannot overlap since the
    // centers are pi apart.
    let weight = |r: f64| smoothstep((1.5 - r) / (1.5 - 0.92));
    let radial = |r: f64| r * r;
    let w_a = weight(r_a);
    let w_b = weight(r_b);
    w_a * radial(r_a) + w_b * radial(r_b) + (1.0 - w_a - w_b) * s * s
}

/// The lamination function sampled on the wide chart.
pub fn twist_lamination(n_theta: usize, n_s: usize, disk_center: Point) -> Result<ScalarField> {
    let chart = AnnulusChart::wide();
    ScalarField::from_fn(chart, n_theta, n_s, move |theta, s| {
        twist_lamination_value(&chart, disk_center, theta, s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_height_is_identity_on_core() {
        assert_eq!(compact_height_profile(0.5), 0.5);
        assert_eq!(compact_height_profile(0.01), 0.01);
        assert_eq!(compact_height_profile(0.99), 0.99);
        assert_eq!(compact_height_profile(0.0), 0.0);
        assert_eq!(compact_height_profile(1.0), 0.0);
    }

    #[test]
    fn compact_height_monotone_on_rise() {
        let mut prev = -1.0;
        for k in 0..=1000 {
            let s = 0.994 * k as f64 / 1000.0;
            let v = compact_height_profile(s);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn plateau_bump_measures() {
        let f = plateau_bump(512, 512).unwrap();
        let c = plateau_center();
        assert_eq!(f.eval(c).unwrap(), 1.0);
        // support and plateau measures via sublevel sweeps
        let total = f.chart().total_area();
        let support = total - f.sublevel_area(1e-9);
        assert!((support - SUPPORT_MEASURE).abs() < 0.01, "support {support}");
        let plateau = total - f.sublevel_area(1.0 - 1e-9);
        assert!((plateau - PLATEAU_MEASURE).abs() < 0.01, "plateau {plateau}");
        assert_eq!(f.boundary_max_abs(), 0.0);
    }

    #[test]
    fn plateau_bump_integral_between_areas() {
        let f = plateau_bump(512, 512).unwrap();
        let cal = f.integrate();
        assert!(cal > PLATEAU_MEASURE && cal < SUPPORT_MEASURE, "integral {cal}");
    }

    #[test]
    fn terraced_bump_support_measure() {
        let f = terraced_bump(384, 384, 0.3).unwrap();
        let total = f.chart().total_area();
        // above the terrace level: the bump support plus the upper stem
        // band s > 0.88 (measure 0.12)
        let above = total - f.sublevel_area(TERRACE_LEVEL + 1e-9);
        assert!((above - (0.3 + 0.12)).abs() < 0.01, "above-terrace measure {above}");
    }

    #[test]
    fn lamination_symmetric_under_half_turn() {
        let chart = AnnulusChart::wide();
        let c = Point::new(0.0, 0.0);
        for (theta, s) in [(0.3, 0.4), (2.0, -1.0), (4.4, 1.2)] {
            let a = twist_lamination_value(&chart, c, theta, s);
            let b = twist_lamination_value(&chart, c, theta + PI, s);
            assert!((a - b).abs() < 1e-12);
        }
    }
}
