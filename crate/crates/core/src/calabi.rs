//! Calabi-type evaluations for autonomous maps through sphere cappings.
//!
//! For an autonomous map generated by a compactly supported field `F`, the
//! Calabi value is the integral of `F`. Capping the annulus with disks of
//! areas `(a, b)` embeds it in a sphere; the sphere-level evaluation is
//! `integral - sphere_area * F(median of the capped tree)`, and the
//! normalized difference of the two recovers `F` at the h-percentile with
//! `h = (1 + b - a) / 2` whenever that percentile exists. When it does not
//! (the percentile falls in a gap), the difference is still well defined
//! and the gap record is attached — that mismatch between the two cappings
//! is the obstruction mechanism everything downstream exercises.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reeb::{build_reeb_tree, GapRecord, PercentileOutcome, ReebTree, TreePoint};
use crate::surface::ScalarField;

/// Cap areas glued to the bottom and top boundary circles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub a: f64,
    pub b: f64,
}

impl CapSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0) || !(b >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cap areas must be non-negative, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn sphere_area(&self, annulus_area: f64) -> f64 {
        annulus_area + self.a + self.b
    }

    /// Percentile level selected by these caps on the unit-area annulus.
    pub fn percentile_level(&self) -> f64 {
        0.5 * (1.0 + self.b - self.a)
    }
}

/// Calabi value of the time-1 map of an autonomous, compactly supported
/// field: the integral of the field against the area form.
pub fn calabi(field: &ScalarField) -> Result<f64> {
    let max_abs = field.boundary_max_abs();
    if max_abs > 0.0 {
        return Err(Error::NotCompactlySupported { max_abs });
    }
    Ok(field.integrate())
}

/// Result of one capped evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct CappedValue {
    /// Normalized difference of the two Calabi evaluations; equals the
    /// field value at the capped-tree median.
    pub value: f64,
    /// Sphere-level Calabi value.
    pub sphere_calabi: f64,
    /// Median of the capped tree.
    pub median: TreePoint,
    /// Percentile level selected by the caps.
    pub h: f64,
    /// The base-tree percentile when it exists.
    pub percentile: Option<TreePoint>,
    /// The covering gap when it does not.
    pub gap: Option<GapRecord>,
}

/// Evaluator holding the field, its Calabi integral and its Reeb tree so a
/// family of cappings can be processed without rebuilding.
pub struct AutonomousEvaluator {
    field: ScalarField,
    tree: ReebTree,
    integral: f64,
}

impl AutonomousEvaluator {
    pub fn new(field: ScalarField) -> Result<Self> {
        let integral = calabi(&field)?;
        let tree = build_reeb_tree(&field)?;
        Ok(Self {
            field,
            tree,
            integral,
        })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn tree(&self) -> &ReebTree {
        &self.tree
    }

    pub fn calabi(&self) -> f64 {
        self.integral
    }

    /// Sphere-level Calabi value for the capped embedding: the field
    /// extends by zero to the caps and the capped-tree median evaluates it.
    pub fn calabi_sphere(&self, caps: &CapSpec) -> f64 {
        let sphere = caps.sphere_area(self.field.chart().total_area());
        let median = self.tree.median_capped(caps.a, caps.b);
        self.integral - sphere * median.value
    }

    /// The normalized difference of the annulus and sphere evaluations,
    /// with the percentile cross-check. Requires the unit-area chart so the
    /// caps select a percentile level.
    pub fn capped_difference(&self, caps: &CapSpec) -> Result<CappedValue> {
        let total = self.field.chart().total_area();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnitArea { total });
        }
        let h = caps.percentile_level();
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::InvalidConfig(format!(
                "caps ({}, {}) select percentile level {h} outside [0, 1]",
                caps.a, caps.b
            )));
        }
        let median = self.tree.median_capped(caps.a, caps.b);
        let sphere = caps.sphere_area(total);
        let sphere_calabi = self.integral - sphere * median.value;
        let value = (self.integral - sphere_calabi) / sphere;
        let (percentile, gap) = match self.tree.percentile(h)? {
            PercentileOutcome::Found(p) => {
                let scale = self
                    .field
                    .max_value()
                    .abs()
                    .max(self.field.min_value().abs())
                    .max(1e-12);
                if (p.value - value).abs() > 1e-3 * scale {
                    return Err(Error::PercentileMismatch {
                        difference: value,
                        percentile: p.value,
                    });
                }
                (Some(p), None)
            }
            PercentileOutcome::Gap(g) => (None, Some(g)),
        };
        Ok(CappedValue {
            value,
            sphere_calabi,
            median,
            h,
            percentile,
            gap,
        })
    }
}

/// One-shot sphere-level Calabi value.
pub fn calabi_sphere_autonomous(field: &ScalarField, caps: &CapSpec) -> Result<f64> {
    Ok(AutonomousEvaluator::new(field.clone())?.calabi_sphere(caps))
}

/// One-shot normalized difference.
pub fn r_ab_autonomous(field: &ScalarField, caps: &CapSpec) -> Result<CappedValue> {
    AutonomousEvaluator::new(field.clone())?.capped_difference(caps)
}

/// Additivity over commuting factors: the evaluation of a commuting product
/// is the sum of the factors' evaluations. The caller vouches for the
/// commutation (checked dynamically elsewhere).
pub fn r_ab_sum_commuting(values: &[f64]) -> f64 {
    values.iter().sum()
}
