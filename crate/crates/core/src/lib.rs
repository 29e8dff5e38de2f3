//! Digitized angles on the pixel grid.
//!
//! Two lines of rational slope `a/b` and `c/d` meeting at a corner point
//! produce, after rounding to pixel boundaries, one of `|ad - bc|` shapes up
//! to translation, each with equal probability when the corner is uniform.
//! This crate computes those shapes exactly, classifies corners, builds the
//! partition of corner positions into classes, and checks the counts and the
//! uniformity both exactly and by sampling.

pub mod digitizer;
pub mod numerics;
pub mod partition;
pub mod render;
pub mod shapes;
pub mod verifier;

pub use digitizer::{
    digitize_segment, pixel_in_angle, round_nearest, trace_region_boundary, AngleSpec,
    DigitizeError, GridPath, PixelIndex, Point, Slopes, SpecError,
};
pub use numerics::{ceil_exact, extended_gcd, gcd, Rational};
pub use partition::{locate_in_partition, partition_unit_square, Parallelogram};
pub use render::{render_partition, render_pixelset, Format, RenderOptions};
pub use shapes::{
    class_index, enumerate_shapes, equivalent, reflection_symmetric, region_params, Axis,
    PixelSet, RegionParams, ShapeClass, ShapeError,
};
pub use verifier::{
    exact_class_areas, hobby_region_check, sample_class_frequencies, theorem_sweep,
    ClassHistogram, SweepReport,
};
