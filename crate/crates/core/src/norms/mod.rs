//! Strictly convex norms, their Gauss maps and support points.

mod table;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use table::{Provenance, SupportTable, TableDiagnostics, ANTIPODAL_TOL, DEFAULT_ROWS};

use crate::error::{Error, Result};
use crate::search::golden_max;
use crate::vecops::{cross2, dot, norm2, polar_angle, scale, turn_angle, unit};

/// Distance from the unit sphere tolerated by [`SpherePoint::new`].
pub const SPHERE_TOL: f64 = 1e-12;

/// Inner-product norm `sqrt(x^T Q x)` with cached inverse and square root.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    q: DMatrix<f64>,
    q_inv: DMatrix<f64>,
}

impl InnerProduct {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.q_inv
    }
}

#[derive(Debug, Clone)]
pub enum NormModel {
    Euclidean {
        dim: usize,
    },
    Lp {
        p: f64,
        dim: usize,
    },
    InnerProduct(InnerProduct),
    /// Planar norm given by a tabulated support function. `None` until loaded.
    SupportTable(Option<Arc<SupportTable>>),
}

/// A point on the unit sphere of some norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Wraps `coords`, checking `| ||coords|| - 1 | <= 1e-12`.
    pub fn new(norm: &NormModel, coords: Vec<f64>) -> Result<Self> {
        let v = norm.eval(&coords)?;
        if (v - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotOnSphere((v - 1.0).abs()));
        }
        Ok(SpherePoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Polar angle in `[0, 2 pi)`; meaningful in the plane only.
    pub fn polar_angle(&self) -> f64 {
        polar_angle(&self.coords)
    }
}

/// Hyperplane `w^perp` stored through its canonical Euclidean unit normal.
///
/// The first coordinate with magnitude above `1e-14` is positive, so `w` and
/// `-w` map to the same value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperplaneNormal {
    w: Vec<f64>,
}

impl HyperplaneNormal {
    pub fn new(v: &[f64]) -> Result<Self> {
        let n = norm2(v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(
                "hyperplane normal must be a nonzero finite vector".into(),
            ));
        }
        let mut w = scale(v, 1.0 / n);
        if let Some(first) = w.iter().find(|c| c.abs() > 1e-14) {
            if *first < 0.0 {
                w.iter_mut().for_each(|c| *c = -*c);
            }
        }
        Ok(HyperplaneNormal { w })
    }

    /// The line through the origin with direction angle `theta` (planar case).
    pub fn from_line_angle(theta: f64) -> Self {
        HyperplaneNormal::new(&[-theta.sin(), theta.cos()]).expect("unit vector")
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Unit direction spanning `w^perp` in the plane, `w` rotated clockwise.
    pub fn line_direction(&self) -> [f64; 2] {
        [self.w[1], -self.w[0]]
    }

    /// Direction angle in `[0, pi)` of the line `w^perp` (planar case).
    pub fn line_angle(&self) -> f64 {
        let d = self.line_direction();
        let a = d[1].atan2(d[0]);
        a.rem_euclid(PI)
    }
}

/// Result of the sweep check on the planar Gauss map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussReport {
    pub grid_size: usize,
    /// `max |G(-x) + G(x)|` over the sweep.
    pub antipodal_defect: f64,
    /// Gauss angle strictly increases along a counterclockwise sweep and
    /// winds exactly once.
    pub monotone: bool,
    pub min_inner: f64,
}

impl GaussReport {
    pub fn passes(&self, antipodal_tol: f64) -> bool {
        self.antipodal_defect <= antipodal_tol && self.monotone && self.min_inner > 0.0
    }
}

/// Points of the unit sphere farthest from and closest to the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoints {
    pub farthest: SpherePoint,
    pub closest: SpherePoint,
    /// `|G(v) - v/|v||` at the two points.
    pub farthest_defect: f64,
    pub closest_defect: f64,
}

impl NormModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(NormModel::Euclidean { dim })
    }

    /// L^p norm; `p` must lie in `(1, inf)` so that the norm is strictly convex and C^1.
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::NotStrictlyConvex(format!(
                "L^p requires 1 < p < inf, got p = {p}"
            )));
        }
        Ok(NormModel::Lp { p, dim })
    }

    /// Inner-product norm for a symmetric positive-definite `q`.
    pub fn inner_product(q: DMatrix<f64>) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n {
            return Err(Error::InvalidParameter("Q must be square".into()));
        }
        check_dim(n)?;
        let asym = (&q - q.transpose()).abs().max();
        if asym > 1e-12 * q.abs().max().max(1.0) {
            return Err(Error::InvalidParameter(format!("Q is not symmetric (defect {asym:e})")));
        }
        let min_eig = q.clone().symmetric_eigen().eigenvalues.min();
        if !(min_eig > 1e-12) {
            return Err(Error::NotStrictlyConvex(format!(
                "Q is not positive-definite (min eigenvalue {min_eig:e})"
            )));
        }
        let q_inv = q.clone().cholesky().expect("positive-definite").inverse();
        Ok(NormModel::InnerProduct(InnerProduct { q, q_inv }))
    }

    pub fn support_table(table: SupportTable) -> Self {
        NormModel::SupportTable(Some(Arc::new(table)))
    }

    /// Placeholder for a table-backed norm whose table is not loaded yet.
    pub fn support_table_unloaded() -> Self {
        NormModel::SupportTable(None)
    }

    pub fn dim(&self) -> usize {
        match self {
            NormModel::Euclidean { dim } | NormModel::Lp { dim, .. } => *dim,
            NormModel::InnerProduct(ip) => ip.q.nrows(),
            NormModel::SupportTable(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NormModel::Euclidean { .. } => "euclidean",
            NormModel::Lp { .. } => "lp",
            NormModel::InnerProduct(_) => "inner_product",
            NormModel::SupportTable(_) => "support_table",
        }
    }

    pub fn table(&self) -> Result<&SupportTable> {
        match self {
            NormModel::SupportTable(Some(t)) => Ok(t),
            NormModel::SupportTable(None) => Err(Error::ModelNotReady),
            _ => Err(Error::InvalidParameter("norm is not table-backed".into())),
        }
    }

    fn check_vec(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates `||x||`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_vec(x)?;
        Ok(match self {
            NormModel::Euclidean { .. } => norm2(x),
            NormModel::Lp { p, .. } => lp_norm(x, *p),
            NormModel::InnerProduct(ip) => {
                let v = DVector::from_column_slice(x);
                (v.dot(&(&ip.q * &v))).max(0.0).sqrt()
            }
            NormModel::SupportTable(_) => {
                let t = self.table()?;
                let r = norm2(x);
                if r == 0.0 {
                    return Ok(0.0);
                }
                let (phi, _) = t.normal_angle_of(x);
                r / norm2(&t.boundary_point(phi))
            }
        })
    }

    /// Radial projection of a nonzero vector onto the unit sphere.
    pub fn sphere_point(&self, direction: &[f64]) -> Result<SpherePoint> {
        let v = self.eval(direction)?;
        if !(v > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        let coords = scale(direction, 1.0 / v);
        Ok(SpherePoint { coords })
    }

    /// Point of the planar unit sphere at polar angle `t`.
    pub fn sphere_point_at_angle(&self, t: f64) -> Result<SpherePoint> {
        self.sphere_point(&unit(t))
    }

    /// Euclidean unit outward normal at `x`, i.e. the normalized gradient of
    /// the norm. Defined for every nonzero `x` (the gradient is 0-homogeneous).
    pub fn normal_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x)?;
        if norm2(x) == 0.0 || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NotSmoothHere);
        }
        let g = match self {
            NormModel::Euclidean { .. } => x.to_vec(),
            NormModel::Lp { p, .. } => {
                let m = x.iter().fold(0.0f64, |a, c| a.max(c.abs()));
                x.iter().map(|c| c.signum() * (c.abs() / m).powf(p - 1.0)).collect()
            }
            NormModel::InnerProduct(ip) => {
                let v = DVector::from_column_slice(x);
                (&ip.q * v).as_slice().to_vec()
            }
            NormModel::SupportTable(_) => {
                let t = self.table()?;
                let (phi, flip) = t.normal_angle_of(x);
                let u = unit(phi);
                return Ok(if flip { vec![-u[0], -u[1]] } else { u.to_vec() });
            }
        };
        let n = norm2(&g);
        if !(n > 0.0) {
            return Err(Error::NotSmoothHere);
        }
        Ok(scale(&g, 1.0 / n))
    }

    /// Gauss map `G(x)` of a point on the unit sphere.
    pub fn gauss_map(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        self.normal_at(x.coords())
    }

    /// Support point: the unique maximizer of `<x, w>` over the unit ball,
    /// equivalently `G^{-1}(w)`.
    pub fn inverse_gauss(&self, w: &[f64]) -> Result<SpherePoint> {
        self.check_vec(w)?;
        let len = norm2(w);
        if (len - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "direction must be a Euclidean unit vector (|w| = {len})"
            )));
        }
        let coords = match self {
            NormModel::Euclidean { .. } => w.to_vec(),
            NormModel::Lp { p, .. } => {
                let q = p / (p - 1.0);
                let m = w.iter().fold(0.0f64, |a, c| a.max(c.abs()));
                let raw: Vec<f64> = w.iter().map(|c| c.signum() * (c.abs() / m).powf(q - 1.0)).collect();
                let n = lp_norm(&raw, *p);
                scale(&raw, 1.0 / n)
            }
            NormModel::InnerProduct(ip) => {
                let v = DVector::from_column_slice(w);
                let y = &ip.q_inv * &v;
                let s = v.dot(&y).sqrt();
                (y / s).as_slice().to_vec()
            }
            NormModel::SupportTable(_) => {
                let t = self.table()?;
                // reflect so that the value is exactly odd in w
                let flip = w[1] < 0.0 || (w[1] == 0.0 && w[0] < 0.0);
                if flip {
                    let p = t.boundary_point(polar_angle(&[-w[0], -w[1]]));
                    vec![-p[0], -p[1]]
                } else {
                    t.boundary_point(polar_angle(w)).to_vec()
                }
            }
        };
        // renormalize away rounding, keep the point exactly on the sphere
        let v = self.eval(&coords)?;
        Ok(SpherePoint {
            coords: scale(&coords, 1.0 / v),
        })
    }

    /// Support point found by golden-section maximization of `<x(t), w>` over
    /// the polar-angle parameterization of the planar unit sphere.
    ///
    /// Derivative-free and independent of the support-function formulas; its
    /// accuracy is limited to about `1e-8` in angle.
    pub fn inverse_gauss_search(&self, w: &[f64]) -> Result<SpherePoint> {
        if self.dim() != 2 {
            return Err(Error::InvalidParameter("search inversion is planar only".into()));
        }
        let a = polar_angle(w);
        let score = |t: f64| -> f64 {
            let d = unit(t);
            match self.eval(&d) {
                Ok(v) => dot(&d, w) / v,
                Err(_) => f64::NEG_INFINITY,
            }
        };
        // the maximizer lies within a quarter turn of w
        let t = golden_max(score, a - FRAC_PI_2, a + FRAC_PI_2, 1e-10);
        self.sphere_point_at_angle(t)
    }

    /// Sweeps the planar unit sphere at `grid_size` polar angles and checks
    /// antipodality, strict monotonicity and `<x, G(x)> > 0`.
    pub fn check_gauss_properties(&self, grid_size: usize) -> Result<GaussReport> {
        if self.dim() != 2 {
            return Err(Error::InvalidParameter("Gauss sweep is planar only".into()));
        }
        if grid_size < 16 {
            return Err(Error::InvalidParameter("grid_size must be at least 16".into()));
        }
        let mut antipodal_defect: f64 = 0.0;
        let mut min_inner = f64::INFINITY;
        let mut normals = Vec::with_capacity(grid_size);
        for i in 0..grid_size {
            let t = TAU * i as f64 / grid_size as f64;
            let x = self.sphere_point_at_angle(t)?;
            let g = self.gauss_map(&x)?;
            let neg: Vec<f64> = x.coords().iter().map(|c| -c).collect();
            let gn = self.normal_at(&neg)?;
            antipodal_defect = antipodal_defect.max(((g[0] + gn[0]).powi(2) + (g[1] + gn[1]).powi(2)).sqrt());
            min_inner = min_inner.min(dot(x.coords(), &g));
            normals.push(g);
        }
        let mut monotone = true;
        let mut winding = 0.0;
        for i in 0..grid_size {
            let (a, b) = (&normals[i], &normals[(i + 1) % grid_size]);
            if !(cross2(a, b) > 0.0) || !(dot(a, b) > 0.0) {
                monotone = false;
            }
            winding += turn_angle(a, b);
        }
        if (winding - TAU).abs() > 1e-9 {
            monotone = false;
        }
        Ok(GaussReport {
            grid_size,
            antipodal_defect,
            monotone,
            min_inner,
        })
    }

    /// Points of the planar unit sphere maximizing and minimizing the
    /// Euclidean distance to the origin. Both are fixed points of
    /// `x -> G(x)` versus `x / |x|`.
    pub fn find_gauss_fixed_points(&self) -> Result<FixedPoints> {
        if self.dim() != 2 {
            return Err(Error::InvalidParameter("fixed-point search is planar only".into()));
        }
        const SAMPLES: usize = 4096;
        let radius = |t: f64| -> f64 { 1.0 / self.eval(&unit(t)).unwrap_or(f64::INFINITY) };
        let radii: Vec<f64> = (0..SAMPLES).map(|i| radius(PI * i as f64 / SAMPLES as f64)).collect();
        let (lo, hi) = radii
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
        let step = PI / SAMPLES as f64;
        let (t_far, t_near) = if hi - lo <= 1e-14 * hi {
            (0.0, FRAC_PI_2)
        } else {
            let i_far = argbest(&radii, |a, b| a > b);
            let i_near = argbest(&radii, |a, b| a < b);
            let t_far = golden_max(radius, (i_far as f64 - 1.0) * step, (i_far as f64 + 1.0) * step, 1e-13);
            let t_near = golden_max(
                |t| -radius(t),
                (i_near as f64 - 1.0) * step,
                (i_near as f64 + 1.0) * step,
                1e-13,
            );
            (
                self.polish_fixed_point(t_far, step),
                self.polish_fixed_point(t_near, step),
            )
        };
        let canon = |t: f64| -> Result<SpherePoint> {
            let p = self.sphere_point_at_angle(t)?;
            let h = HyperplaneNormal::new(p.coords())?;
            let s = if dot(h.w(), p.coords()) < 0.0 { -1.0 } else { 1.0 };
            Ok(SpherePoint {
                coords: scale(p.coords(), s),
            })
        };
        let farthest = canon(t_far)?;
        let closest = canon(t_near)?;
        let defect = |p: &SpherePoint| -> Result<f64> {
            let g = self.gauss_map(p)?;
            let r = norm2(p.coords());
            Ok(((g[0] - p.coords()[0] / r).powi(2) + (g[1] - p.coords()[1] / r).powi(2)).sqrt())
        };
        Ok(FixedPoints {
            farthest_defect: defect(&farthest)?,
            closest_defect: defect(&closest)?,
            farthest,
            closest,
        })
    }
}

impl NormModel {
    /// At an extremum of the radius the normal is radial, so the signed
    /// angle between `x` and `G(x)` changes sign; bisect on it when the
    /// golden-section estimate leaves a bracket.
    fn polish_fixed_point(&self, t: f64, width: f64) -> f64 {
        let defect = |s: f64| -> f64 {
            let d = unit(s);
            match self.normal_at(&d) {
                Ok(g) => cross2(&d, &g),
                Err(_) => f64::NAN,
            }
        };
        let (a, b) = (t - width, t + width);
        let (fa, fb) = (defect(a), defect(b));
        if !(fa * fb < 0.0) {
            return t;
        }
        let sign = fa.signum();
        crate::search::bisect_increasing(|s| -sign * defect(s), a, b, 0.0)
    }
}

fn argbest(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "ambient dimension must be >= 2, got {dim}"
        )));
    }
    Ok(())
}

pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|c| (c.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}
