//! Closest-point projections onto hyperplanes, linear projection families
//! and their associated maps, the intertwiner between projections with a
//! common kernel, and the inner-product and `L^p` special cases.

mod family;
mod intertwine;
mod special;

use nalgebra::DMatrix;
use serde::Serialize;

pub use family::{angle_family, associated_g, family_from_gmap, FamilyProvenance, ProjectionFamily};
pub use intertwine::{construct_intertwiner, Intertwiner};
pub use special::{conjugate_projection, linearity_defect, project_line_lp, q_norm_projection_direct, sqrt_spd};

use crate::error::{Error, Result};
use crate::linalg::jacobi_svd;
use crate::norms::{HyperplaneNormal, NormModel};
use crate::search::{bisect_increasing, golden_min};
use crate::vecops::{axpy, dot, norm2, scale};

/// Smallest `|<u, w>|` accepted for a kernel direction `u`.
pub const TRANSVERSALITY_TOL: f64 = 1e-12;

/// The linear projection `x -> x - (<x, w> / <u, w>) u` onto `w^perp`
/// along `span(u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearProjector {
    target: HyperplaneNormal,
    kernel_dir: Vec<f64>,
    #[serde(skip)]
    matrix: DMatrix<f64>,
}

impl LinearProjector {
    pub fn new(target: HyperplaneNormal, kernel_dir: &[f64]) -> Result<Self> {
        let n = target.dim();
        if kernel_dir.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: kernel_dir.len(),
            });
        }
        let len = norm2(kernel_dir);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidParameter("kernel direction must be nonzero".into()));
        }
        let u = scale(kernel_dir, 1.0 / len);
        let w = target.w();
        let uw = dot(&u, w);
        if uw.abs() <= TRANSVERSALITY_TOL {
            return Err(Error::DegenerateSplitting(uw.acos()));
        }
        // orient u so that <u, w> > 0; the projector does not change
        let u = if uw < 0.0 { scale(&u, -1.0) } else { u };
        let uw = uw.abs();
        let matrix = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - u[i] * w[j] / uw);
        Ok(LinearProjector {
            target,
            kernel_dir: u,
            matrix,
        })
    }

    pub fn target(&self) -> &HyperplaneNormal {
        &self.target
    }

    /// Unit kernel direction with `<u, w> > 0`.
    pub fn kernel_dir(&self) -> &[f64] {
        &self.kernel_dir
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.kernel_dir.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let w = self.target.w();
        let c = dot(x, w) / dot(&self.kernel_dir, w);
        axpy(x, -c, &self.kernel_dir)
    }

    /// `max |M^2 - M|` entrywise.
    pub fn idempotence_defect(&self) -> f64 {
        let m2 = &self.matrix * &self.matrix;
        (m2 - &self.matrix).amax()
    }

    /// Numerical rank of the matrix at relative tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let svd = jacobi_svd(&self.matrix);
        let top = svd.max();
        svd.singular_values.iter().filter(|&&s| s > tol * top).count()
    }
}

/// Closest point of `w^perp` to `x` in the norm, via the support point
/// `u = G^{-1}(w)`: the nearest point is `x - (<x, w> / <u, w>) u`.
pub fn project_hyperplane(norm: &NormModel, w: &HyperplaneNormal, x: &[f64]) -> Result<Vec<f64>> {
    Ok(norm_projector(norm, w)?.apply(x))
}

/// The projector `P_V` of the norm onto `V = w^perp`.
pub fn norm_projector(norm: &NormModel, w: &HyperplaneNormal) -> Result<LinearProjector> {
    if w.dim() != norm.dim() {
        return Err(Error::DimensionMismatch {
            expected: norm.dim(),
            got: w.dim(),
        });
    }
    let u = norm.inverse_gauss(w.w())?;
    LinearProjector::new(w.clone(), u.coords())
}

/// Closest point of `w^perp` to `x` found by minimizing `||x - q||` over
/// `q` in `w^perp`: golden-section search along the line in the plane,
/// cyclic exact line searches over an orthonormal basis of `w^perp` in
/// higher dimension.
pub fn project_hyperplane_direct(norm: &NormModel, w: &HyperplaneNormal, x: &[f64]) -> Result<Vec<f64>> {
    let n = norm.dim();
    if w.dim() != n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if w.dim() != n { w.dim() } else { x.len() },
        });
    }
    let c = dot(x, w.w());
    let mut q = axpy(x, -c, w.w());
    if c == 0.0 {
        return Ok(q);
    }
    let basis = hyperplane_basis(w.w());
    if n == 2 {
        let s = line_min(norm, x, &q, &basis[0])?;
        return Ok(axpy(&q, s, &basis[0]));
    }
    let scale_ref = norm2(x);
    for _ in 0..2000 {
        let mut largest: f64 = 0.0;
        for d in &basis {
            let s = line_min(norm, x, &q, d)?;
            q = axpy(&q, s, d);
            largest = largest.max(s.abs());
        }
        if largest <= 1e-15 * scale_ref {
            break;
        }
    }
    Ok(q)
}

/// Minimizer `s` of `||x - q - s d||`; golden section on a bracket where the
/// convex objective rises on both sides, then bisection on the sign of the
/// directional derivative to reach full precision.
fn line_min(norm: &NormModel, x: &[f64], q: &[f64], d: &[f64]) -> Result<f64> {
    let r = |s: f64| -> Vec<f64> {
        let p = axpy(q, s, d);
        x.iter().zip(&p).map(|(a, b)| a - b).collect()
    };
    let obj = |s: f64| norm.eval(&r(s)).unwrap_or(f64::INFINITY);
    let f0 = obj(0.0);
    if f0 == 0.0 {
        return Ok(0.0);
    }
    let mut reach = norm2(&r(0.0)).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        if obj(reach) >= f0 && obj(-reach) >= f0 {
            break;
        }
        reach *= 2.0;
    }
    let s = golden_min(obj, -reach, reach, 1e-12 * reach);
    // slope of the objective: -<grad ||.||(r(s)), d>, nondecreasing in s
    let slope = |s: f64| -> f64 {
        match norm.normal_at(&r(s)) {
            Ok(g) => -dot(&g, d),
            Err(_) => 0.0,
        }
    };
    // flat minima leave golden section far from the optimum; widen the
    // bracket until the slope changes sign across it
    let mut h = 1e-6 * reach;
    while h <= reach {
        let (a, b) = (s - h, s + h);
        if slope(a) < 0.0 && slope(b) > 0.0 {
            return Ok(bisect_increasing(slope, a, b, 0.0));
        }
        h *= 4.0;
    }
    Ok(s)
}

/// Orthonormal basis of `w^perp` by Gram-Schmidt on the standard basis.
pub fn hyperplane_basis(w: &[f64]) -> Vec<Vec<f64>> {
    let n = w.len();
    if n == 2 {
        return vec![vec![w[1], -w[0]]];
    }
    let mut basis: Vec<Vec<f64>> = vec![w.to_vec()];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for b in &basis {
            let c = dot(&e, b);
            e = axpy(&e, -c, b);
        }
        let len = norm2(&e);
        if len > 1e-8 {
            basis.push(scale(&e, 1.0 / len));
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Largest distance of the normalized displacements `x - P(x)` from the
/// line spanned by the first one. Zero when the kernel does not depend on
/// `x`, as for every norm-induced projection onto a hyperplane.
pub fn kernel_collinearity_defect(project: impl Fn(&[f64]) -> Result<Vec<f64>>, points: &[Vec<f64>]) -> Result<f64> {
    let mut first: Option<Vec<f64>> = None;
    let mut worst: f64 = 0.0;
    for x in points {
        let p = project(x)?;
        let d: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
        let len = norm2(&d);
        if len <= 1e-9 * norm2(x).max(1.0) {
            continue;
        }
        let d = scale(&d, 1.0 / len);
        match &first {
            None => first = Some(d),
            Some(f) => {
                let c = dot(&d, f);
                worst = worst.max(norm2(&axpy(&d, -c, f)));
            }
        }
    }
    Ok(worst)
}
