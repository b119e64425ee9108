//! Cantor staircases and the planar C^1 norm whose Gauss map spreads a
//! Cantor set of directions over a set of positive length.

mod curve;
mod glue;
mod set;

pub use curve::{
    end_tangent_angle, product_measure_probe, CounterexampleCurve, CurvePoint, CurveSample, MeasureBounds, SampleKind,
    THETA1_LIMIT,
};
pub use glue::{build_norm, BuiltNorm, GlueOptions};
pub use set::{BasicInterval, CantorSet, Gap, StaircaseValue};
