//! Direction sweeps: projected-dimension profiles over the lines through
//! the origin, exceptional directions, and the Gauss-map pushforward of
//! the Cantor direction set.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::boxdim::{counts_1d, estimate_dim, fit_counts, projected_coordinates, DimensionEstimate};
use crate::cantor::{CantorSet, CounterexampleCurve, MeasureBounds};
use crate::error::{Error, Result};
use crate::fractals::PointCloud;
use crate::norms::HyperplaneNormal;
use crate::projections::ProjectionFamily;

/// Uniform grid of line directions on `[0, pi)`, each carrying weight
/// `1 / count`. The line at angle `a` is `w^perp` with `w = (-sin a, cos a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGrid {
    angles: Vec<f64>,
}

impl DirectionGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter(
                "direction grid needs at least one angle".into(),
            ));
        }
        Ok(DirectionGrid {
            angles: (0..count).map(|i| PI * i as f64 / count as f64).collect(),
        })
    }

    pub fn count(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.angles[i]
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.angles.len() as f64
    }

    /// The line at grid index `i`.
    pub fn line(&self, i: usize) -> HyperplaneNormal {
        HyperplaneNormal::from_line_angle(self.angles[i])
    }
}

/// Projected dimension in one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRecord {
    pub angle: f64,
    /// Estimated dimension, also reported for fits of low quality.
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    pub estimate: Option<DimensionEstimate>,
    /// Estimator error for this direction, if any.
    pub error: Option<String>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalProfile {
    pub records: Vec<ProfileRecord>,
    pub threshold: f64,
    /// Angles whose projected dimension falls below the threshold.
    pub flagged: Vec<f64>,
    /// Grid measure of the flagged angles.
    pub flagged_measure: f64,
}

impl ExceptionalProfile {
    pub fn mean_slope(&self) -> f64 {
        let s: Vec<f64> = self.records.iter().filter_map(|r| r.slope).collect();
        s.iter().sum::<f64>() / s.len().max(1) as f64
    }

    /// Record closest to the given angle.
    pub fn at(&self, angle: f64) -> &ProfileRecord {
        self.records
            .iter()
            .min_by(|a, b| {
                let da = (a.angle - angle).rem_euclid(PI).min((angle - a.angle).rem_euclid(PI));
                let db = (b.angle - angle).rem_euclid(PI).min((angle - b.angle).rem_euclid(PI));
                da.total_cmp(&db)
            })
            .expect("nonempty profile")
    }
}

/// Box-counting dimension of the projection of `cloud` by `family` for
/// every grid direction. Directions whose estimate falls below `threshold`
/// are flagged; the default threshold is `min(1, dim cloud) - 0.1`.
/// Estimator failures are recorded per direction and do not abort the sweep.
pub fn dim_profile(
    family: &ProjectionFamily,
    cloud: &PointCloud,
    grid: &DirectionGrid,
    scales: &[f64],
    threshold: Option<f64>,
) -> Result<ExceptionalProfile> {
    if cloud.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: cloud.dim,
        });
    }
    if grid.count() < 36 {
        return Err(Error::InvalidParameter("a profile needs at least 36 directions".into()));
    }
    for &d in scales {
        if !(d >= 2.0 * cloud.resolution * (1.0 - 1e-12)) {
            return Err(Error::UnderResolved {
                delta: d,
                resolution: cloud.resolution,
            });
        }
    }
    let threshold = match threshold {
        Some(t) => t,
        None => estimate_dim(cloud, scales)?.slope.min(1.0) - 0.1,
    };
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} must be positive"
        )));
    }
    let records: Vec<ProfileRecord> = (0..grid.count())
        .into_par_iter()
        .map(|i| {
            let angle = grid.angle(i);
            let est = family
                .projector(&grid.line(i))
                .and_then(|p| projected_coordinates(&p, cloud))
                .and_then(|xs| {
                    let counts = counts_1d(&xs, scales);
                    fit_counts(scales, &counts)
                });
            let (slope, r2, estimate, error) = match est {
                Ok(e) => (Some(e.slope), Some(e.r2), Some(e), None),
                Err(Error::LowQualityFit { r2, slope, .. }) => (
                    Some(slope),
                    Some(r2),
                    None,
                    Some(format!("low-quality fit (r2 = {r2:.6})")),
                ),
                Err(e) => (None, None, None, Some(e.to_string())),
            };
            ProfileRecord {
                angle,
                flagged: slope.is_some_and(|s| s < threshold),
                slope,
                r2,
                estimate,
                error,
            }
        })
        .collect();
    let flagged: Vec<f64> = records.iter().filter(|r| r.flagged).map(|r| r.angle).collect();
    let flagged_measure = flagged.len() as f64 * grid.weight();
    Ok(ExceptionalProfile {
        records,
        threshold,
        flagged,
        flagged_measure,
    })
}

/// Bounds on the Lebesgue measure of the normal angles `G(gamma(K))` of
/// the norm built from `curve`. The normal angle is the tangent angle
/// shifted by a quarter turn, so the bounds are those of the tangent image.
pub fn gauss_pushforward_measure(curve: &CounterexampleCurve, level: u32) -> Result<MeasureBounds> {
    curve.image_measure_bounds(level)
}

/// Control for the Euclidean norm, whose Gauss map is the identity on the
/// circle: the image of `K` has measure in `[0, (m r)^k]`.
pub fn euclidean_pushforward_measure(cantor: &CantorSet, level: u32) -> MeasureBounds {
    MeasureBounds {
        level,
        lower: 0.0,
        upper: cantor.covering_length(level),
    }
}
