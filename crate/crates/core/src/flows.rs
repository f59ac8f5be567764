//! Hamiltonian vector fields and the area-preserving map algebra.
//!
//! Closed-form maps (rigid rotations and disk twists) are the authoritative
//! building blocks; the fixed-step RK4 integrator validates them and handles
//! arbitrary sampled Hamiltonians. Every evaluation carries a continuous
//! theta-lift so rotation numbers downstream are unambiguous.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EllipseSpec, Point, Vec2};
use crate::surface::{AnnulusChart, ScalarField};
use crate::util::{bisect_monotone, smoothstep};

/// Result of one lifted map evaluation: the image point (theta wrapped into
/// the fundamental domain) plus the continuous theta displacement.
#[derive(Clone, Copy, Debug)]
pub struct Lifted {
    pub point: Point,
    pub lift: f64,
}

/// Monotone angle profile of a twist, in the scaled radius of its region
/// (`rho = 1` on the region boundary): `alpha_max` up to `rho_plateau`,
/// hermite decay to zero at `rho_support`, zero beyond.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleProfile {
    pub alpha_max: f64,
    pub rho_plateau: f64,
    pub rho_support: f64,
}

impl AngleProfile {
    pub fn angle(&self, rho: f64) -> f64 {
        if rho >= self.rho_support {
            0.0
        } else if rho <= self.rho_plateau {
            self.alpha_max
        } else {
            self.alpha_max
                * smoothstep((self.rho_support - rho) / (self.rho_support - self.rho_plateau))
        }
    }
}

/// A twist supported in an elliptical region: the scaled circle of radius
/// `rho` rotates by `t * profile.angle(rho)` under the time-`t` map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistSpec {
    pub region: EllipseSpec,
    pub profile: AngleProfile,
}

impl TwistSpec {
    /// The standard monotone twist on a round disk: full angle `alpha_max`
    /// inside `r_plateau * radius`, zero outside `r_support * radius`.
    pub fn monotone(region: EllipseSpec, alpha_max: f64, rho_plateau: f64, rho_support: f64) -> Self {
        Self {
            region,
            profile: AngleProfile {
                alpha_max,
                rho_plateau,
                rho_support,
            },
        }
    }

    /// Chart radius at which the time-1 twist angle equals `angle`
    /// (round regions; the profile is monotone non-increasing).
    pub fn radius_where_angle(&self, angle: f64) -> Option<f64> {
        if angle <= 0.0 || angle >= self.profile.alpha_max {
            return None;
        }
        // angle is non-increasing in rho, so -angle is monotone increasing
        let rho = bisect_monotone(
            |r| -self.profile.angle(r),
            self.profile.rho_plateau,
            self.profile.rho_support,
            -angle,
        );
        Some(rho * self.region.semi_theta)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MapKind {
    Identity,
    /// `(theta, s) -> (theta + t / C, s)`; `t` counts units of the height
    /// flow, so it is full turns on the unit-area chart and radians on the
    /// wide chart.
    Rotation { t: f64 },
    DiskTwist { spec: TwistSpec, t: f64 },
    Flow {
        field: Arc<ScalarField>,
        t: f64,
        step: f64,
    },
    /// `maps[0] o maps[1] o ...` — evaluation applies right-to-left.
    Composition { maps: Vec<SurfaceMap> },
    Iterate { base: Box<SurfaceMap>, n: i64 },
}

/// An evaluable area-preserving map of the annulus with a theta-lift.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceMap {
    chart: AnnulusChart,
    kind: MapKind,
}

/// Closed-form rotation map of the chart: theta advances by `t / C`.
pub fn rotation_map(chart: AnnulusChart, t: f64) -> SurfaceMap {
    SurfaceMap {
        chart,
        kind: MapKind::Rotation { t },
    }
}

/// Closed-form twist map: scaled circles of the region rotate by
/// `t * angle(rho)`.
pub fn disk_twist_map(chart: AnnulusChart, spec: TwistSpec, t: f64) -> SurfaceMap {
    SurfaceMap {
        chart,
        kind: MapKind::DiskTwist { spec, t },
    }
}

/// Numerically integrated time-`t` map of the Hamiltonian vector field of
/// `field`, with fixed RK4 step `step`.
pub fn flow_map(field: ScalarField, t: f64, step: f64) -> Result<SurfaceMap> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("flow step {step} must be positive")));
    }
    Ok(SurfaceMap {
        chart: field.chart(),
        kind: MapKind::Flow {
            field: Arc::new(field),
            t,
            step,
        },
    })
}

/// Lazy composition `f o g` (apply `g` first); lifts add.
pub fn compose(f: SurfaceMap, g: SurfaceMap) -> Result<SurfaceMap> {
    if f.chart != g.chart {
        return Err(Error::ChartMismatch);
    }
    let chart = f.chart;
    let mut maps = Vec::new();
    for m in [f, g] {
        match m.kind {
            MapKind::Composition { maps: inner } => maps.extend(inner),
            _ => maps.push(m),
        }
    }
    Ok(SurfaceMap {
        chart,
        kind: MapKind::Composition { maps },
    })
}

/// `n`-fold iterate; negative `n` iterates the inverse.
pub fn iterate(base: SurfaceMap, n: i64) -> SurfaceMap {
    SurfaceMap {
        chart: base.chart,
        kind: MapKind::Iterate {
            base: Box::new(base),
            n,
        },
    }
}

impl SurfaceMap {
    pub fn identity(chart: AnnulusChart) -> Self {
        Self {
            chart,
            kind: MapKind::Identity,
        }
    }

    pub fn chart(&self) -> AnnulusChart {
        self.chart
    }

    /// Apply the map, returning the image point and the theta-lift.
    pub fn apply(&self, p: Point) -> Result<Lifted> {
        match &self.kind {
            MapKind::Identity => Ok(Lifted {
                point: self.chart.canonical(p),
                lift: 0.0,
            }),
            MapKind::Rotation { t } => {
                let lift = t * self.chart.height_advance_rate();
                Ok(Lifted {
                    point: self.chart.canonical(Point::new(p.theta + lift, p.s)),
                    lift,
                })
            }
            MapKind::DiskTwist { spec, t } => Ok(apply_twist(&self.chart, spec, *t, p)),
            MapKind::Flow { field, t, step } => integrate_flow(field, *t, *step, p),
            MapKind::Composition { maps } => {
                let mut cur = self.chart.canonical(p);
                let mut lift = 0.0;
                for m in maps.iter().rev() {
                    let out = m.apply(cur)?;
                    cur = out.point;
                    lift += out.lift;
                }
                Ok(Lifted { point: cur, lift })
            }
            MapKind::Iterate { base, n } => {
                let (map, count) = if *n >= 0 {
                    (base.as_ref().clone(), *n)
                } else {
                    (base.inverse(), -*n)
                };
                let mut cur = self.chart.canonical(p);
                let mut lift = 0.0;
                for _ in 0..count {
                    let out = map.apply(cur)?;
                    cur = out.point;
                    lift += out.lift;
                }
                Ok(Lifted { point: cur, lift })
            }
        }
    }

    /// Image point only.
    pub fn apply_point(&self, p: Point) -> Result<Point> {
        Ok(self.apply(p)?.point)
    }

    /// The inverse map (exact for closed forms; time reversal for flows).
    pub fn inverse(&self) -> SurfaceMap {
        let kind = match &self.kind {
            MapKind::Identity => MapKind::Identity,
            MapKind::Rotation { t } => MapKind::Rotation { t: -t },
            MapKind::DiskTwist { spec, t } => MapKind::DiskTwist { spec: *spec, t: -t },
            MapKind::Flow { field, t, step } => MapKind::Flow {
                field: field.clone(),
                t: -t,
                step: *step,
            },
            MapKind::Composition { maps } => MapKind::Composition {
                maps: maps.iter().rev().map(|m| m.inverse()).collect(),
            },
            MapKind::Iterate { base, n } => MapKind::Iterate {
                base: base.clone(),
                n: -n,
            },
        };
        SurfaceMap {
            chart: self.chart,
            kind,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn apply_twist(chart: &AnnulusChart, spec: &TwistSpec, t: f64, p: Point) -> Lifted {
    let c = spec.region.center;
    let u = chart.theta_diff(p.theta, c.theta) / spec.region.semi_theta;
    let v = (p.s - c.s) / spec.region.semi_s;
    let rho = u.hypot(v);
    if rho >= spec.profile.rho_support {
        return Lifted {
            point: chart.canonical(p),
            lift: 0.0,
        };
    }
    let beta = t * spec.profile.angle(rho);
    let (sin_b, cos_b) = beta.sin_cos();
    let u2 = u * cos_b - v * sin_b;
    let v2 = u * sin_b + v * cos_b;
    let d_theta = (u2 - u) * spec.region.semi_theta;
    let s2 = c.s + v2 * spec.region.semi_s;
    Lifted {
        point: chart.canonical(Point::new(p.theta + d_theta, s2)),
        lift: d_theta,
    }
}

/// Hamiltonian vector field `X_H(p) = ((dH/ds) / C, -(dH/dtheta) / C)` via
/// centered differences of the grid spacing (one-sided at the strip edge).
pub fn hamiltonian_vector_field(field: &ScalarField, p: Point) -> Result<Vec2> {
    let chart = field.chart();
    if p.s <= chart.s_min || p.s >= chart.s_max {
        return Err(Error::BoundaryPoint {
            theta: p.theta,
            s: p.s,
        });
    }
    vector_field_lenient(field, p)
}

/// Same stencil without the interior-point check; used by the integrator,
/// which reports escapes itself.
fn vector_field_lenient(field: &ScalarField, p: Point) -> Result<Vec2> {
    let chart = field.chart();
    let h_theta = field.d_theta();
    let h_s = field.d_s();
    let f_tp = field.eval(Point::new(p.theta + h_theta, p.s))?;
    let f_tm = field.eval(Point::new(p.theta - h_theta, p.s))?;
    let d_theta = (f_tp - f_tm) / (2.0 * h_theta);
    let s_hi = (p.s + h_s).min(chart.s_max);
    let s_lo = (p.s - h_s).max(chart.s_min);
    let f_sp = field.eval(Point::new(p.theta, s_hi))?;
    let f_sm = field.eval(Point::new(p.theta, s_lo))?;
    let d_s = (f_sp - f_sm) / (s_hi - s_lo);
    let c = chart.area_scale;
    Ok(Vec2::new(d_s / c, -d_theta / c))
}

fn integrate_flow(field: &ScalarField, t: f64, step: f64, p: Point) -> Result<Lifted> {
    let chart = field.chart();
    let n_steps = (t.abs() / step).ceil().max(1.0) as usize;
    let h = t / n_steps as f64;
    // theta integrated without wrapping: the final offset is the lift
    let mut theta = chart.wrap_theta(p.theta);
    let start_theta = theta;
    let mut s = p.s;
    let escape = |theta: f64, s: f64, t_now: f64| Error::OrbitEscape {
        theta: chart.wrap_theta(theta),
        s,
        t: t_now,
    };
    for k in 0..n_steps {
        let eval = |th: f64, sv: f64| -> Result<Vec2> {
            if !chart.contains_s(sv) {
                return Err(escape(th, sv, k as f64 * h));
            }
            vector_field_lenient(field, Point::new(th, sv))
        };
        let k1 = eval(theta, s)?;
        let k2 = eval(theta + 0.5 * h * k1.d_theta, s + 0.5 * h * k1.d_s)?;
        let k3 = eval(theta + 0.5 * h * k2.d_theta, s + 0.5 * h * k2.d_s)?;
        let k4 = eval(theta + h * k3.d_theta, s + h * k3.d_s)?;
        theta += h / 6.0 * (k1.d_theta + 2.0 * k2.d_theta + 2.0 * k3.d_theta + k4.d_theta);
        s += h / 6.0 * (k1.d_s + 2.0 * k2.d_s + 2.0 * k3.d_s + k4.d_s);
        if !chart.contains_s(s) {
            return Err(escape(theta, s, (k + 1) as f64 * h));
        }
    }
    Ok(Lifted {
        point: chart.canonical(Point::new(theta, s)),
        lift: theta - start_theta,
    })
}

/// Area of the image of `region` under `map`, estimated by rasterizing the
/// chart and testing cell centers against the preimage, i.e. counting
/// `{ y : map^{-1}(y) in region }`.
pub fn image_area(map: &SurfaceMap, region: &crate::geometry::Region, n_cells: usize) -> Result<f64> {
    let chart = map.chart();
    let inv = map.inverse();
    let d_theta = chart.circumference / n_cells as f64;
    let d_s = (chart.s_max - chart.s_min) / n_cells as f64;
    let cell = chart.area_scale * d_theta * d_s;
    let mut area = 0.0;
    for i in 0..n_cells {
        let theta = (i as f64 + 0.5) * d_theta;
        for j in 0..n_cells {
            let s = chart.s_min + (j as f64 + 0.5) * d_s;
            let pre = inv.apply_point(Point::new(theta, s))?;
            if region_contains(&chart, region, pre) {
                area += cell;
            }
        }
    }
    Ok(area)
}

/// Membership test for sampling regions, with theta wrapped.
pub fn region_contains(chart: &AnnulusChart, region: &crate::geometry::Region, p: Point) -> bool {
    match region {
        crate::geometry::Region::Ellipse(e) => {
            let u = chart.theta_diff(p.theta, e.center.theta) / e.semi_theta;
            let v = (p.s - e.center.s) / e.semi_s;
            u * u + v * v < 1.0
        }
        crate::geometry::Region::Rect(r) => {
            let t = chart.wrap_theta(p.theta);
            t > r.theta_lo && t < r.theta_hi && p.s > r.s_lo && p.s < r.s_hi
        }
    }
}

/// Point on the region boundary at parameter `u` in `[0, 1)`.
pub fn region_boundary_point(chart: &AnnulusChart, region: &crate::geometry::Region, u: f64) -> Point {
    match region {
        crate::geometry::Region::Ellipse(e) => {
            let a = std::f64::consts::TAU * u;
            chart.canonical(Point::new(
                e.center.theta + e.semi_theta * a.cos(),
                e.center.s + e.semi_s * a.sin(),
            ))
        }
        crate::geometry::Region::Rect(r) => {
            let w = r.theta_hi - r.theta_lo;
            let h = r.s_hi - r.s_lo;
            let perim = 2.0 * (w + h);
            let mut d = u.rem_euclid(1.0) * perim;
            if d < w {
                return Point::new(r.theta_lo + d, r.s_lo);
            }
            d -= w;
            if d < h {
                return Point::new(r.theta_hi, r.s_lo + d);
            }
            d -= h;
            if d < w {
                return Point::new(r.theta_hi - d, r.s_hi);
            }
            d -= w;
            Point::new(r.theta_lo, r.s_hi - d)
        }
    }
}

/// Signed scaled distance of a point from the region boundary (negative
/// inside). Exact for round disks and rectangles, a scaled-radius proxy for
/// genuine ellipses.
pub fn region_boundary_distance(chart: &AnnulusChart, region: &crate::geometry::Region, p: Point) -> f64 {
    match region {
        crate::geometry::Region::Ellipse(e) => {
            let u = chart.theta_diff(p.theta, e.center.theta) / e.semi_theta;
            let v = (p.s - e.center.s) / e.semi_s;
            (u.hypot(v) - 1.0) * e.semi_theta.min(e.semi_s)
        }
        crate::geometry::Region::Rect(r) => {
            let t = chart.wrap_theta(p.theta);
            let dx = (r.theta_lo - t).max(t - r.theta_hi);
            let dy = (r.s_lo - p.s).max(p.s - r.s_hi);
            if dx <= 0.0 && dy <= 0.0 {
                dx.max(dy)
            } else {
                dx.max(0.0).hypot(dy.max(0.0))
            }
        }
    }
}

/// Sample the generator of a round monotone twist: the radial Hamiltonian
/// whose flow rotates the circle of radius `r` by `angle(r)` per unit time.
/// Built by integrating `C * r * angle(r)` outward on a fine radial table.
pub fn twist_generator_field(
    chart: AnnulusChart,
    spec: &TwistSpec,
    n_theta: usize,
    n_s: usize,
) -> Result<ScalarField> {
    let radius = spec.region.semi_theta;
    assert!(
        (spec.region.semi_theta - spec.region.semi_s).abs() < 1e-12,
        "generator construction assumes a round region"
    );
    let r_max = radius * spec.profile.rho_support;
    let table_n = 4096usize;
    let dr = r_max / table_n as f64;
    // cumulative integral of C * r * angle(r/radius) from r outward
    let mut cumulative = vec![0.0; table_n + 1];
    for k in (0..table_n).rev() {
        let r0 = k as f64 * dr;
        let r1 = (k + 1) as f64 * dr;
        let f0 = chart.area_scale * r0 * spec.profile.angle(r0 / radius);
        let fm = chart.area_scale * (0.5 * (r0 + r1)) * spec.profile.angle(0.5 * (r0 + r1) / radius);
        let f1 = chart.area_scale * r1 * spec.profile.angle(r1 / radius);
        cumulative[k] = cumulative[k + 1] + dr / 6.0 * (f0 + 4.0 * fm + f1);
    }
    let center = spec.region.center;
    ScalarField::from_fn(chart, n_theta, n_s, move |theta, s| {
        let r = chart.distance(Point::new(theta, s), center);
        if r >= r_max {
            return 0.0;
        }
        let x = r / dr;
        let k = (x.floor() as usize).min(table_n - 1);
        let frac = x - k as f64;
        cumulative[k] * (1.0 - frac) + cumulative[k + 1] * frac
    })
}
