//! Annulus charts, sampled scalar fields, interpolation and area quadrature.
//!
//! The chart is the strip `S^1 x [s_min, s_max]` with the area form
//! `area_scale * dtheta ^ ds`. Scalar fields are sampled on a regular,
//! theta-periodic grid and evaluated by bilinear interpolation; area
//! bookkeeping (quadrature, sublevel areas, Reeb measures) uses the
//! piecewise-linear model on the triangulated grid so that every consumer
//! sees the same cell-level fractions.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::util::tri_sublevel_fraction;

/// Strip chart of the annulus with its area form `C * dtheta ^ ds`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusChart {
    pub s_min: f64,
    pub s_max: f64,
    /// Period of the theta coordinate, in radians.
    pub circumference: f64,
    /// The constant `C` of the area form.
    pub area_scale: f64,
}

impl AnnulusChart {
    pub fn new(s_min: f64, s_max: f64, circumference: f64, area_scale: f64) -> Result<Self> {
        if !(s_min < s_max) || !(circumference > 0.0) || !(area_scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bad chart parameters: s in [{s_min}, {s_max}], circumference {circumference}, scale {area_scale}"
            )));
        }
        let chart = Self {
            s_min,
            s_max,
            circumference,
            area_scale,
        };
        if !chart.total_area().is_finite() || chart.total_area() <= 0.0 {
            return Err(Error::InvalidConfig("chart area not positive finite".into()));
        }
        Ok(chart)
    }

    /// The unit-area chart: `S^1 x [0, 1]` with `C = 1 / 2 pi`.
    pub fn unit_area() -> Self {
        Self::new(0.0, 1.0, std::f64::consts::TAU, 1.0 / std::f64::consts::TAU).unwrap()
    }

    /// The wide chart: `S^1 x [-2, 2]` with `C = 1`, total area `8 pi`.
    pub fn wide() -> Self {
        Self::new(-2.0, 2.0, std::f64::consts::TAU, 1.0).unwrap()
    }

    pub fn total_area(&self) -> f64 {
        self.area_scale * self.circumference * (self.s_max - self.s_min)
    }

    /// theta wrapped into `[0, circumference)`.
    pub fn wrap_theta(&self, theta: f64) -> f64 {
        let l = self.circumference;
        let t = theta % l;
        if t < 0.0 {
            t + l
        } else {
            t
        }
    }

    /// Signed theta difference `a - b`, unwrapped into `(-L/2, L/2]`.
    pub fn theta_diff(&self, a: f64, b: f64) -> f64 {
        let l = self.circumference;
        let mut d = (a - b) % l;
        if d > 0.5 * l {
            d -= l;
        } else if d <= -0.5 * l {
            d += l;
        }
        d
    }

    /// Chordal distance in chart coordinates with theta locally unwrapped.
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.theta_diff(a.theta, b.theta).hypot(a.s - b.s)
    }

    pub fn contains_s(&self, s: f64) -> bool {
        (self.s_min..=self.s_max).contains(&s)
    }

    /// Canonical representative with wrapped theta.
    pub fn canonical(&self, p: Point) -> Point {
        Point::new(self.wrap_theta(p.theta), p.s)
    }

    /// theta-advance rate of the height function's flow on this chart
    /// (the field `s` generates `theta_dot = 1 / C`).
    pub fn height_advance_rate(&self) -> f64 {
        1.0 / self.area_scale
    }
}

/// A scalar field sampled on a regular theta-periodic grid.
///
/// Samples are stored theta-major: `values[i * n_s + j]` is the sample at
/// `theta_i = i * circumference / n_theta`, `s_j = s_min + j * ds` with
/// `ds = (s_max - s_min) / (n_s - 1)`. Row `i = n_theta` is identified with
/// row `0`.
#[derive(Clone, Debug)]
pub struct ScalarField {
    chart: AnnulusChart,
    n_theta: usize,
    n_s: usize,
    values: Vec<f64>,
}

/// Default grid resolution; resolves every step, ramp and plateau used by
/// the stock scenarios.
pub const DEFAULT_GRID: (usize, usize) = (512, 512);

impl ScalarField {
    /// Sample `f(theta, s)` on an `n_theta x n_s` grid.
    pub fn from_fn<F>(chart: AnnulusChart, n_theta: usize, n_s: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
    {
        if n_theta < 8 || n_s < 8 {
            return Err(Error::InvalidConfig(format!(
                "grid {n_theta} x {n_s} too coarse"
            )));
        }
        let mut values = Vec::with_capacity(n_theta * n_s);
        for i in 0..n_theta {
            let theta = chart.circumference * i as f64 / n_theta as f64;
            for j in 0..n_s {
                let s = chart.s_min + (chart.s_max - chart.s_min) * j as f64 / (n_s - 1) as f64;
                let v = f(theta, s);
                if !v.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "field sample not finite at ({theta}, {s})"
                    )));
                }
                values.push(v);
            }
        }
        Ok(Self {
            chart,
            n_theta,
            n_s,
            values,
        })
    }

    pub fn chart(&self) -> AnnulusChart {
        self.chart
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_theta, self.n_s)
    }

    pub fn d_theta(&self) -> f64 {
        self.chart.circumference / self.n_theta as f64
    }

    pub fn d_s(&self) -> f64 {
        (self.chart.s_max - self.chart.s_min) / (self.n_s - 1) as f64
    }

    pub fn sample(&self, i: usize, j: usize) -> f64 {
        self.values[(i % self.n_theta) * self.n_s + j]
    }

    /// Grid coordinate of sample `(i, j)`.
    pub fn node_point(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.d_theta() * (i % self.n_theta) as f64,
            self.chart.s_min + self.d_s() * j as f64,
        )
    }

    /// Multiply all samples by a constant.
    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= k;
        }
        out
    }

    /// Pointwise sum of two fields on the same grid.
    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        if self.chart != other.chart || self.dims() != other.dims() {
            return Err(Error::ChartMismatch);
        }
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v += w;
        }
        Ok(out)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn oscillation(&self) -> f64 {
        self.max_value() - self.min_value()
    }

    /// Bilinear interpolation, with theta wrapped and `s` required inside
    /// the strip (a hair of slack absorbs rounding from wrapped arithmetic).
    pub fn eval(&self, p: Point) -> Result<f64> {
        let slack = 1e-9 * (self.chart.s_max - self.chart.s_min);
        let s = if p.s < self.chart.s_min - slack || p.s > self.chart.s_max + slack {
            return Err(Error::OutOfStrip {
                theta: p.theta,
                s: p.s,
            });
        } else {
            p.s.clamp(self.chart.s_min, self.chart.s_max)
        };
        let theta = self.chart.wrap_theta(p.theta);
        let tx = theta / self.d_theta();
        let i = (tx.floor() as usize).min(self.n_theta - 1);
        let fx = tx - i as f64;
        let ty = (s - self.chart.s_min) / self.d_s();
        let j = (ty.floor() as usize).min(self.n_s - 2);
        let fy = ty - j as f64;
        let v00 = self.sample(i, j);
        let v10 = self.sample(i + 1, j);
        let v01 = self.sample(i, j + 1);
        let v11 = self.sample(i + 1, j + 1);
        Ok(v00 * (1.0 - fx) * (1.0 - fy)
            + v10 * fx * (1.0 - fy)
            + v01 * (1.0 - fx) * fy
            + v11 * fx * fy)
    }

    /// Integral of the field against the area form, exact for the bilinear
    /// interpolant (periodic trapezoid in theta, trapezoid in s). Fixed
    /// summation order keeps reruns bit-identical.
    pub fn integrate(&self) -> f64 {
        let cell = self.chart.area_scale * self.d_theta() * self.d_s();
        let mut total = 0.0;
        for i in 0..self.n_theta {
            for j in 0..self.n_s - 1 {
                let avg = 0.25
                    * (self.sample(i, j)
                        + self.sample(i + 1, j)
                        + self.sample(i, j + 1)
                        + self.sample(i + 1, j + 1));
                total += cell * avg;
            }
        }
        total
    }

    /// Area of `{field < c}` under the PL model on the triangulated grid.
    pub fn sublevel_area(&self, c: f64) -> f64 {
        let tri_measure = 0.5 * self.chart.area_scale * self.d_theta() * self.d_s();
        let mut total = 0.0;
        for i in 0..self.n_theta {
            for j in 0..self.n_s - 1 {
                let v00 = self.sample(i, j);
                let v10 = self.sample(i + 1, j);
                let v01 = self.sample(i, j + 1);
                let v11 = self.sample(i + 1, j + 1);
                total += tri_measure * tri_sublevel_fraction([v00, v10, v11], c);
                total += tri_measure * tri_sublevel_fraction([v00, v11, v01], c);
            }
        }
        total
    }

    /// Max |value| over the two boundary rows.
    pub fn boundary_max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n_theta {
            m = m.max(self.sample(i, 0).abs());
            m = m.max(self.sample(i, self.n_s - 1).abs());
        }
        m
    }

    /// Spread (max - min) of a boundary row; 0 means the row is a level set.
    pub fn boundary_spread(&self, top: bool) -> f64 {
        let j = if top { self.n_s - 1 } else { 0 };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n_theta {
            let v = self.sample(i, j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    }
}

/// Serialized form: JSON header plus a base64 payload of little-endian f64
/// samples in theta-major order.
#[derive(Serialize, Deserialize)]
struct FieldDto {
    chart: AnnulusChart,
    n_theta: usize,
    n_s: usize,
    encoding: String,
    payload: String,
}

impl ScalarField {
    fn to_dto(&self) -> FieldDto {
        let mut bytes = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        FieldDto {
            chart: self.chart,
            n_theta: self.n_theta,
            n_s: self.n_s,
            encoding: "base64/f64-le".to_string(),
            payload: BASE64.encode(bytes),
        }
    }

    fn from_dto(dto: FieldDto) -> Result<Self> {
        if dto.encoding != "base64/f64-le" {
            return Err(Error::InvalidConfig(format!(
                "unsupported field encoding {}",
                dto.encoding
            )));
        }
        let bytes = BASE64
            .decode(dto.payload.as_bytes())
            .map_err(|e| Error::InvalidConfig(format!("bad field payload: {e}")))?;
        if bytes.len() != dto.n_theta * dto.n_s * 8 {
            return Err(Error::InvalidConfig("field payload length mismatch".into()));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            chart: dto.chart,
            n_theta: dto.n_theta,
            n_s: dto.n_s,
            values,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_dto())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_dto(serde_json::from_str(text)?)
    }
}

impl Serialize for ScalarField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_dto().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = FieldDto::deserialize(deserializer)?;
        Self::from_dto(dto).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn height(chart: AnnulusChart, grid: (usize, usize)) -> ScalarField {
        ScalarField::from_fn(chart, grid.0, grid.1, |_, s| s).unwrap()
    }

    #[test]
    fn eval_reproduces_linear_field() {
        let f = height(AnnulusChart::unit_area(), (64, 64));
        let v = f.eval(Point::new(1.3, 0.25)).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn eval_zero_field() {
        let f = ScalarField::from_fn(AnnulusChart::unit_area(), 32, 32, |_, _| 0.0).unwrap();
        assert_eq!(f.eval(Point::new(3.0, 0.7)).unwrap(), 0.0);
    }

    #[test]
    fn eval_wraps_theta() {
        let chart = AnnulusChart::unit_area();
        let f = ScalarField::from_fn(chart, 64, 64, |t, _| (t).cos()).unwrap();
        let a = f.eval(Point::new(0.3, 0.5)).unwrap();
        let b = f.eval(Point::new(0.3 + chart.circumference, 0.5)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_out_of_strip() {
        let f = height(AnnulusChart::unit_area(), (32, 32));
        assert!(matches!(
            f.eval(Point::new(0.0, 1.5)),
            Err(Error::OutOfStrip { .. })
        ));
    }

    #[test]
    fn integrate_constant_unit_chart() {
        let f = ScalarField::from_fn(AnnulusChart::unit_area(), 128, 128, |_, _| 1.0).unwrap();
        assert!((f.integrate() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_height_unit_chart() {
        let f = height(AnnulusChart::unit_area(), (128, 128));
        assert!((f.integrate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn integrate_constant_wide_chart() {
        let f = ScalarField::from_fn(AnnulusChart::wide(), 128, 128, |_, _| 1.0).unwrap();
        assert!((f.integrate() - 8.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn integrate_is_linear() {
        let chart = AnnulusChart::unit_area();
        let f = ScalarField::from_fn(chart, 64, 64, |t, s| (t.sin() + s).exp()).unwrap();
        let g = ScalarField::from_fn(chart, 64, 64, |t, s| t.cos() * s * s).unwrap();
        let combo = f.scale(2.5).add(&g.scale(-1.25)).unwrap();
        let lhs = combo.integrate();
        let rhs = 2.5 * f.integrate() - 1.25 * g.integrate();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn integrate_second_order_convergence() {
        let chart = AnnulusChart::unit_area();
        let exact = 0.0; // integral of sin(theta) * anything over a period
        let err = |n: usize| {
            let f = ScalarField::from_fn(chart, n, n, |t, s| t.sin() * (1.0 + s)).unwrap();
            (f.integrate() - exact).abs()
        };
        // smooth non-trivial integrand with a known value
        let exact2 = 1.0 / 3.0;
        let err2 = |n: usize| {
            let f = ScalarField::from_fn(chart, n, n, |_, s| s * s).unwrap();
            (f.integrate() - exact2).abs()
        };
        assert!(err(64) < 1e-12);
        let (e1, e2) = (err2(32), err2(64));
        assert!(e2 < e1 * 0.3, "refinement should shrink error: {e1} -> {e2}");
    }

    #[test]
    fn sublevel_of_height() {
        let f = height(AnnulusChart::unit_area(), (128, 128));
        assert!((f.sublevel_area(0.3) - 0.3).abs() < 1e-12);
        assert_eq!(f.sublevel_area(-1.0), 0.0);
        assert!((f.sublevel_area(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sublevel_monotone_and_bounded() {
        let chart = AnnulusChart::unit_area();
        let f = ScalarField::from_fn(chart, 64, 64, |t, s| (3.0 * t).sin() * 0.2 + s).unwrap();
        let mut prev = 0.0;
        for k in 0..=20 {
            let c = -0.3 + 1.6 * k as f64 / 20.0;
            let a = f.sublevel_area(c);
            assert!(a >= prev - 1e-12);
            assert!((-1e-12..=chart.total_area() + 1e-12).contains(&a));
            prev = a;
        }
    }

    #[test]
    fn serialization_round_trip() {
        let f = ScalarField::from_fn(AnnulusChart::wide(), 32, 16, |t, s| t.sin() + s).unwrap();
        let text = f.to_json().unwrap();
        let g = ScalarField::from_json(&text).unwrap();
        assert_eq!(f.dims(), g.dims());
        assert_eq!(f.chart(), g.chart());
        for i in 0..32 {
            for j in 0..16 {
                assert_eq!(f.sample(i, j), g.sample(i, j));
            }
        }
    }
}
