//! Area-preserving dynamics on an annulus chart.
//!
//! The crate builds the computable objects behind a family of annulus
//! constructions: sampled Hamiltonian functions with quadrature, closed-form
//! and integrated flow maps, measured Reeb trees with medians / percentiles /
//! gap reports, Calabi-type evaluations through sphere cappings, rotation
//! numbers via continuous lifts, and winding-number fixed-point certificates.
//!
//! Modules map onto the pipeline:
//!
//! * [`surface`] — charts, scalar fields, interpolation, area quadrature;
//! * [`fields`] — the concrete field profiles used by the two scenarios;
//! * [`flows`] — Hamiltonian vector fields and the map algebra;
//! * [`reeb`] — measured contour trees, stems, percentiles, gaps;
//! * [`calabi`] — sphere cappings and the capped-median evaluations;
//! * [`dynamics`] — rotation numbers, displacement and winding certificates;
//! * [`scenario`] — end-to-end certificate runs and result emission.

pub mod calabi;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod flows;
pub mod geometry;
pub mod reeb;
pub mod scenario;
pub mod surface;
mod util;

pub use error::{Error, Result};
pub use geometry::{DiskSpec, EllipseSpec, Point, RectSpec, Region, Vec2};
pub use surface::{AnnulusChart, ScalarField};
