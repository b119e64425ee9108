//! Box-counting dimension of point clouds and of their projections.
//!
//! Box counts are taken on the grid `delta Z^n` anchored at the origin.
//! Box-counting dimension bounds Hausdorff dimension from above and may
//! exceed it; the reference sets used here are self-similar with the open
//! set condition, where the two agree.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractals::PointCloud;
use crate::norms::{HyperplaneNormal, NormModel};
use crate::projections::{norm_projector, LinearProjector};
use crate::sweep::DirectionGrid;
use crate::vecops::dot;

/// Caveat attached to every estimate.
pub const CAVEAT: &str = "box-counting dimension; an upper bound for Hausdorff dimension";

/// Fits below this coefficient of determination are refused.
pub const MIN_R2: f64 = 0.98;

/// Largest ambient dimension handled by the counter.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Minus the least-squares slope of `log N` against `log delta`.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub caveat: &'static str,
}

fn check_delta(delta: f64, resolution: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() || delta < 2.0 * resolution * (1.0 - 1e-12) {
        return Err(Error::UnderResolved { delta, resolution });
    }
    Ok(())
}

fn cell(x: f64, delta: f64) -> i64 {
    (x / delta).floor() as i64
}

fn count_keys(mut keys: Vec<[i64; MAX_DIM]>) -> usize {
    keys.par_sort_unstable();
    keys.dedup();
    keys.len()
}

/// Number of occupied cells of `delta Z^n`.
pub fn box_count(cloud: &PointCloud, delta: f64) -> Result<usize> {
    check_delta(delta, cloud.resolution)?;
    if cloud.dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "box counting supports dimension <= {MAX_DIM}"
        )));
    }
    let keys: Vec<[i64; MAX_DIM]> = cloud
        .coords
        .par_chunks_exact(cloud.dim)
        .map(|p| {
            let mut k = [0i64; MAX_DIM];
            for (slot, &x) in k.iter_mut().zip(p) {
                *slot = cell(x, delta);
            }
            k
        })
        .collect();
    Ok(count_keys(keys))
}

/// Number of occupied length-`delta` bins among scalar values.
pub fn count_1d(values: &[f64], delta: f64) -> usize {
    let mut keys: Vec<i64> = values.par_iter().map(|&x| cell(x, delta)).collect();
    keys.par_sort_unstable();
    keys.dedup();
    keys.len()
}

/// Occupied bins of scalar values at several box sizes, sorting once.
pub fn counts_1d(values: &[f64], scales: &[f64]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    scales
        .iter()
        .map(|&d| {
            let mut n = 0;
            let mut last = None;
            for &x in &v {
                let c = cell(x, d);
                if last != Some(c) {
                    n += 1;
                    last = Some(c);
                }
            }
            n
        })
        .collect()
}

/// `base^{-k}` for every `k >= k_min` with the box size still at least twice
/// the cloud resolution.
pub fn default_scales(cloud: &PointCloud, k_min: u32) -> Vec<f64> {
    let b = cloud.base as f64;
    (k_min..64)
        .map(|k| b.powi(-(k as i32)))
        .take_while(|&d| d >= 2.0 * cloud.resolution * (1.0 - 1e-12))
        .collect()
}

/// Least-squares fit of `log N(delta)` against `log delta`.
pub fn fit_counts(scales: &[f64], counts: &[usize]) -> Result<DimensionEstimate> {
    if scales.len() < 4 {
        return Err(Error::TooFewScales(scales.len()));
    }
    let xs: Vec<f64> = scales.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("scales must be distinct".into()));
    }
    let b = sxy / sxx;
    // constant counts are a perfect fit of slope 0
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    let est = DimensionEstimate {
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        slope: -b,
        intercept: my - b * mx,
        r2,
        caveat: CAVEAT,
    };
    if r2 < MIN_R2 {
        return Err(Error::LowQualityFit {
            r2,
            min_r2: MIN_R2,
            slope: est.slope,
        });
    }
    Ok(est)
}

/// Box-counting dimension over the given scales.
pub fn estimate_dim(cloud: &PointCloud, scales: &[f64]) -> Result<DimensionEstimate> {
    if scales.len() < 4 {
        return Err(Error::TooFewScales(scales.len()));
    }
    let counts = scales
        .iter()
        .map(|&d| box_count(cloud, d))
        .collect::<Result<Vec<_>>>()?;
    fit_counts(scales, &counts)
}

/// Arc-length coordinates of `P(x)` along the target line of a planar
/// projector.
pub fn projected_coordinates(projector: &LinearProjector, cloud: &PointCloud) -> Result<Vec<f64>> {
    if cloud.dim != 2 || projector.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: cloud.dim,
        });
    }
    let d = projector.target().line_direction();
    Ok(cloud
        .coords
        .par_chunks_exact(2)
        .map(|p| dot(&projector.apply(p), &d))
        .collect())
}

/// Occupied `delta`-bins of the projected cloud on the target line.
pub fn projected_counts_by(projector: &LinearProjector, cloud: &PointCloud, delta: f64) -> Result<usize> {
    check_delta(delta, cloud.resolution)?;
    Ok(count_1d(&projected_coordinates(projector, cloud)?, delta))
}

/// Occupied `delta`-bins of the closest-point projection of the cloud onto
/// `w^perp`, measured by Euclidean arc length along the line.
pub fn projected_counts(norm: &NormModel, cloud: &PointCloud, w: &HyperplaneNormal, delta: f64) -> Result<usize> {
    projected_counts_by(&norm_projector(norm, w)?, cloud, delta)
}

/// Mean over the grid directions of the projected length at resolution
/// `delta`, i.e. occupied bins times `delta`.
pub fn favard_proxy(norm: &NormModel, cloud: &PointCloud, grid: &DirectionGrid, delta: f64) -> Result<f64> {
    check_delta(delta, cloud.resolution)?;
    let counts = (0..grid.count())
        .into_par_iter()
        .map(|i| projected_counts(norm, cloud, &grid.line(i), delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(counts.iter().map(|&c| c as f64 * delta).sum::<f64>() / grid.count() as f64)
}

/// Bin counts for a pair of parameterized scalar curves with
/// `|beta(s) - beta(s')| <= lip |alpha(s) - alpha(s')|`: returns
/// `(N_beta(delta), N_alpha(delta / (2 lip)))`.
///
/// Each `alpha`-bin of width `delta / (2 lip)` is carried into a set of
/// diameter at most `delta / 2`, which meets at most two `beta`-bins, so
/// `N_beta <= 2 N_alpha`.
pub fn lipschitz_image_counts(alpha: &[f64], beta: &[f64], lip: f64, delta: f64) -> Result<(usize, usize)> {
    if alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            got: beta.len(),
        });
    }
    if !(lip > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidParameter("lip and delta must be positive".into()));
    }
    Ok((count_1d(beta, delta), count_1d(alpha, delta / (2.0 * lip))))
}
