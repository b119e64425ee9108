use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::norms::lp_norm;
use crate::search::bisect_increasing;
use crate::vecops::{axpy, norm2};

/// Eigenvalue floor used when taking square roots of SPD matrices.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// `Q^{1/2}` and `Q^{-1/2}` by symmetric eigendecomposition.
pub fn sqrt_spd(q: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !q.is_square() {
        return Err(Error::InvalidParameter("Q must be square".into()));
    }
    let eig = SymmetricEigen::new(q.clone());
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::NotStrictlyConvex("Q is not positive definite".into()));
    }
    let v = &eig.eigenvectors;
    let d = eig.eigenvalues.map(|l| l.max(EIGEN_FLOOR).sqrt());
    let root = v * DMatrix::from_diagonal(&d) * v.transpose();
    let inv_root = v * DMatrix::from_diagonal(&d.map(|s| 1.0 / s)) * v.transpose();
    Ok((root, inv_root))
}

fn check_subspace(q: &DMatrix<f64>, basis: &DMatrix<f64>, x: &[f64]) -> Result<()> {
    let n = q.nrows();
    if basis.nrows() != n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if basis.nrows() != n { basis.nrows() } else { x.len() },
        });
    }
    if basis.ncols() == 0 || basis.ncols() >= n {
        return Err(Error::InvalidParameter("subspace dimension must be in [1, n)".into()));
    }
    Ok(())
}

/// Closest point of `V = span(basis)` to `x` in the norm `sqrt(x^T Q x)`,
/// computed as `Psi^{-1} P^eucl_{Psi V} Psi x` with the isometry
/// `Psi = Q^{1/2}`.
pub fn conjugate_projection(q: &DMatrix<f64>, basis: &DMatrix<f64>, x: &[f64]) -> Result<Vec<f64>> {
    check_subspace(q, basis, x)?;
    let (root, inv_root) = sqrt_spd(q)?;
    let b = &root * basis;
    let y = &root * DVector::from_column_slice(x);
    // orthogonal projection onto the column space of b via QR
    let qr = b.clone().qr();
    let qm = qr.q();
    let py = &qm * (qm.transpose() * y);
    Ok((inv_root * py).as_slice().to_vec())
}

/// The same closest point from the normal equations `B^T Q B c = B^T Q x`.
pub fn q_norm_projection_direct(q: &DMatrix<f64>, basis: &DMatrix<f64>, x: &[f64]) -> Result<Vec<f64>> {
    check_subspace(q, basis, x)?;
    let xv = DVector::from_column_slice(x);
    let a = basis.transpose() * q * basis;
    let rhs = basis.transpose() * q * xv;
    let c = a
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("subspace basis is degenerate for Q".into()))?
        .solve(&rhs);
    Ok((basis * c).as_slice().to_vec())
}

/// Closest point `t v` of the line `span(v)` to `x` in the `L^p` norm.
///
/// The objective is convex in `t`, so the sign of its derivative,
/// `-sum v_i sgn(r_i) |r_i|^{p-1}` with `r = x - t v`, is bisected.
pub fn project_line_lp(p: f64, v: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::NotStrictlyConvex(format!("p = {p}")));
    }
    if v.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: x.len(),
        });
    }
    let vn = lp_norm(v, p);
    if !(vn > 0.0) {
        return Err(Error::InvalidParameter("line direction must be nonzero".into()));
    }
    let reach = 2.0 * lp_norm(x, p) / vn;
    if reach == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let slope = |t: f64| -> f64 {
        let r = axpy(x, -t, v);
        let m = r.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if m == 0.0 {
            return 0.0;
        }
        -r.iter()
            .zip(v)
            .map(|(ri, vi)| vi * ri.signum() * (ri.abs() / m).powf(p - 1.0))
            .sum::<f64>()
    };
    let t = bisect_increasing(slope, -reach, reach, 0.0);
    Ok(v.iter().map(|c| t * c).collect())
}

/// `max |P(x + c y) - P(x) - c P(y)| / (1 + |x| + |c| |y|)` over sampled
/// `x, y` uniform in `[-1, 1]^dim` and `c` uniform in `[-2, 2]`.
pub fn linearity_defect(
    projector: impl Fn(&[f64]) -> Result<Vec<f64>>,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let c: f64 = rng.gen_range(-2.0..=2.0);
        let lhs = projector(&axpy(&x, c, &y))?;
        let px = projector(&x)?;
        let py = projector(&y)?;
        let diff: Vec<f64> = (0..dim).map(|i| lhs[i] - px[i] - c * py[i]).collect();
        let scale = 1.0 + norm2(&x) + c.abs() * norm2(&y);
        worst = worst.max(norm2(&diff) / scale);
    }
    Ok(worst)
}
