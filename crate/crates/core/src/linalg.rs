//! One-sided Jacobi SVD.
//!
//! nalgebra's bidiagonal SVD (0.33 and 0.34) returns factors that do not
//! reconstruct some rank-deficient 2x2 inputs, e.g. oblique rank-one
//! projectors. Rank and null-space decisions here need full relative
//! accuracy, which the Jacobi rotations provide.

use nalgebra::DMatrix;

/// Singular values and right singular vectors of `a`.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    /// One per column of `a`, unsorted.
    pub singular_values: Vec<f64>,
    /// Columns are the right singular vectors.
    pub v: DMatrix<f64>,
    /// `a v`; column `i` is `sigma_i u_i`.
    pub av: DMatrix<f64>,
}

pub fn jacobi_svd(a: &DMatrix<f64>) -> JacobiSvd {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for i in 0..m.nrows() {
                        let (x, y) = (m[(i, p)], m[(i, q)]);
                        m[(i, p)] = c * x - s * y;
                        m[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let singular_values = (0..n).map(|j| w.column(j).norm()).collect();
    JacobiSvd {
        singular_values,
        v,
        av: w,
    }
}

impl JacobiSvd {
    pub fn max(&self) -> f64 {
        self.singular_values.iter().fold(0.0, |a: f64, &b| a.max(b))
    }

    /// Moore-Penrose inverse, dropping singular values at or below `cut`.
    pub fn pseudo_inverse(&self, cut: f64) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.v.nrows(), self.av.nrows());
        for (i, &s) in self.singular_values.iter().enumerate() {
            if s > cut {
                out += self.v.column(i) * self.av.column(i).transpose() / (s * s);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_an_oblique_rank_one_projector() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                0.00248048296594372,
                -0.04974263935698889,
                -0.04974263935698889,
                0.9975195170340562,
            ],
        );
        let svd = jacobi_svd(&m);
        let recon = &svd.av * svd.v.transpose();
        assert!((recon - &m).amax() < 1e-15);
        let mut sv = svd.singular_values.clone();
        sv.sort_by(f64::total_cmp);
        assert!(sv[0] < 1e-15 && (sv[1] - 1.0).abs() < 1e-12);
        let p = svd.pseudo_inverse(1e-10);
        assert!((&m * &p * &m - &m).amax() < 1e-14);
    }

    #[test]
    fn wide_and_tall_matrices() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, -1.0, 0.5, 2.0]);
        for m in [a.clone(), a.transpose()] {
            let svd = jacobi_svd(&m);
            assert!((&svd.av * svd.v.transpose() - &m).amax() < 1e-14);
            let p = svd.pseudo_inverse(1e-10);
            assert!((&m * &p * &m - &m).amax() < 1e-13);
        }
    }
}
