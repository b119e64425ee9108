use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::jacobi_svd;

/// Tolerance for the kernel comparison and the rank decisions.
pub const KERNEL_TOL: f64 = 1e-10;

/// Linear map `h` with `h o f = g`, bijective from `f(R^n)` onto `g(R^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    h: DMatrix<f64>,
    rank: usize,
}

impl Intertwiner {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Common rank of `f`, `g` and `h` restricted to `f(R^n)`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        (&self.h * nalgebra::DVector::from_column_slice(y)).as_slice().to_vec()
    }
}

/// Builds `h = g f^+` after checking `ker f = ker g` by mutual containment
/// of null-space bases.
pub fn construct_intertwiner(f: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<Intertwiner> {
    if f.ncols() != g.ncols() {
        return Err(Error::DimensionMismatch {
            expected: f.ncols(),
            got: g.ncols(),
        });
    }
    let (kf, rf) = null_space(f);
    let (kg, rg) = null_space(g);
    let defect = containment_defect(g, &kf).max(containment_defect(f, &kg));
    if rf != rg || defect > KERNEL_TOL {
        return Err(Error::KernelMismatch(defect.max(if rf != rg { 1.0 } else { 0.0 })));
    }
    let svd = jacobi_svd(f);
    let f_pinv = svd.pseudo_inverse(KERNEL_TOL * svd.max().max(1.0));
    Ok(Intertwiner {
        h: g * f_pinv,
        rank: rf,
    })
}

/// Orthonormal basis of `ker a` (as columns) and the rank of `a`.
fn null_space(a: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let svd = jacobi_svd(a);
    let cut = KERNEL_TOL * svd.max().max(1.0);
    let cols: Vec<_> = (0..a.ncols())
        .filter(|&i| svd.singular_values[i] <= cut)
        .map(|i| svd.v.column(i).into_owned())
        .collect();
    let rank = a.ncols() - cols.len();
    let basis = if cols.is_empty() {
        DMatrix::zeros(a.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    (basis, rank)
}

/// `|a k| / |a|`: how far the columns of `k` are from lying in `ker a`.
fn containment_defect(a: &DMatrix<f64>, k: &DMatrix<f64>) -> f64 {
    if k.ncols() == 0 {
        return 0.0;
    }
    (a * k).norm() / a.norm().max(f64::MIN_POSITIVE)
}
