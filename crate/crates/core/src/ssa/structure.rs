//! Equality diagnostics: the log-equality residual and the invariant-subspace
//! structure that forces equality for every function.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{blocks, eig_sym, Mat, Partition, SymMatrix};

/// Default rank and residual tolerance for [`detect_structure`].
pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-8;
/// Highest polynomial degree accepted by [`stone_weierstrass_check`].
pub const MAX_POLY_DEGREE: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct EqualityDiagnostics {
    /// `‖A₁₃ − A₁₂A₂₂⁻¹A₂₃‖_F`; absent when `A₂₂` is singular.
    pub log_residual: Option<f64>,
    pub a13_norm: f64,
    /// `‖A₁₂A₂₃‖_F`.
    pub a12a23_norm: f64,
    /// Absent unless the Krylov structure was computed.
    pub decomposable: Option<bool>,
    #[serde(skip)]
    pub krylov: Option<KrylovStructure>,
}

/// A subspace `K` of the middle block that contains the range of `A₂₃`, is
/// invariant under `A₂₂` and is annihilated by `A₁₂`.
#[derive(Clone, Debug, Serialize)]
pub struct KrylovStructure {
    /// Orthonormal columns spanning `K`.
    #[serde(skip)]
    pub basis: Mat,
    pub krylov_dim: usize,
    /// `‖(I − Π)A₂₂Π‖_F`
    pub invariance_residual: f64,
    /// `‖(I − Π)A₂₃‖_F`
    pub range_residual: f64,
    /// `‖A₁₂Π‖_F`
    pub kernel_residual: f64,
    pub decomposable: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalizes `v` against `basis` (two Gram–Schmidt passes) and appends
/// it normalized if what is left exceeds `threshold`.
fn push_orthogonal(basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>, threshold: f64) -> bool {
    for _ in 0..2 {
        for q in basis.iter() {
            let c = dot(q, &v);
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
    }
    let n = norm(&v);
    if n <= threshold || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    basis.push(v);
    true
}

fn columns_to_mat(rows: usize, cols: &[Vec<f64>]) -> Mat {
    Mat::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// `(I − QQᵀ)·M` for orthonormal `Q`.
fn remove_span(q: &Mat, m: &Mat) -> Result<Mat> {
    let coeffs = q.tr_matmul(m)?;
    m.sub(&q.matmul(&coeffs)?)
}

/// `‖A₁₃ − A₁₂A₂₂⁻¹A₂₃‖_F` with the two companion norms.
///
/// A singular `A₂₂` (smallest eigenvalue at most `1e-12·‖A₂₂‖₂`) is a domain
/// error; no pseudo-inverse is substituted.
pub fn log_equality_residual(a: &SymMatrix, p: &Partition) -> Result<EqualityDiagnostics> {
    let b = blocks(a, p)?;
    let a13_norm = b.a13.frobenius();
    let a12a23_norm = b.a12.matmul(&b.a23)?.frobenius();
    let log_residual = if p.d2 == 0 {
        a13_norm
    } else {
        let eig = eig_sym(&b.a22)?;
        let smallest = eig.min();
        if smallest <= 1e-12 * eig.spectral_norm() {
            return Err(Error::domain(
                smallest,
                "A22 is singular; the log equality condition needs it invertible",
            ));
        }
        let inv: Vec<f64> = eig.eigenvalues.iter().map(|v| 1.0 / v).collect();
        let a22_inv = eig.reconstruct(&inv);
        let predicted = b.a12.matmul(&a22_inv.as_mat().matmul(&b.a23)?)?;
        b.a13.sub(&predicted)?.frobenius()
    };
    Ok(EqualityDiagnostics {
        log_residual: Some(log_residual),
        a13_norm,
        a12a23_norm,
        decomposable: None,
        krylov: None,
    })
}

/// Orthonormal basis of the numerical range of `m` (`d2×d3`): left singular
/// vectors with `σ > tol·σ_max`, read off the symmetric dilation
/// `[[0, m], [mᵀ, 0]]` whose positive eigenvalues are the singular values.
fn numerical_range(m: &Mat, tol: f64) -> Result<Vec<Vec<f64>>> {
    let (r, c) = (m.rows(), m.cols());
    if r == 0 || c == 0 || m.max_abs() == 0.0 {
        return Ok(Vec::new());
    }
    let dilation = SymMatrix::from_upper(
        r + c,
        |i, j| {
            if i < r && j >= r {
                m[(i, j - r)]
            } else {
                0.0
            }
        },
    );
    let eig = eig_sym(&dilation)?;
    let sigma_max = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let mut basis = Vec::new();
    for (k, &s) in eig.eigenvalues.iter().enumerate().rev() {
        if s <= tol * sigma_max {
            break;
        }
        // the top half of a dilation eigenvector has norm 1/√2
        let top: Vec<f64> = (0..r).map(|i| eig.vectors[(i, k)]).collect();
        push_orthogonal(&mut basis, top, 0.5);
    }
    Ok(basis)
}

/// Builds `K` from the range of `A₂₃` by repeatedly applying `A₂₂` and
/// re-orthonormalizing until no direction longer than `tol·max(1, ‖A₂₂‖_F)`
/// appears, then measures how far `A` is from splitting along `K`.
///
/// `decomposable` requires the three residuals and `‖A₁₃‖_F` to be at most
/// `tol·max(1, ‖A‖_F)`.
pub fn detect_structure(a: &SymMatrix, p: &Partition, tol: f64) -> Result<KrylovStructure> {
    let b = blocks(a, p)?;
    let d2 = p.d2;
    let mut basis = numerical_range(&b.a23, tol)?;
    let a22 = b.a22.as_mat();
    let threshold = tol * b.a22.frobenius().max(1.0);
    let mut frontier: Vec<usize> = (0..basis.len()).collect();
    while !frontier.is_empty() && basis.len() < d2 {
        let mut next = Vec::new();
        for idx in frontier {
            let q = &basis[idx];
            let w: Vec<f64> = (0..d2).map(|i| dot(a22.row(i), q)).collect();
            if push_orthogonal(&mut basis, w, threshold) {
                next.push(basis.len() - 1);
            }
            if basis.len() == d2 {
                break;
            }
        }
        frontier = next;
    }

    let q = columns_to_mat(d2, &basis);
    let invariance_residual = remove_span(&q, &a22.matmul(&q)?)?.frobenius();
    let range_residual = remove_span(&q, &b.a23)?.frobenius();
    let kernel_residual = b.a12.matmul(&q)?.frobenius();
    let bound = tol * a.frobenius().max(1.0);
    let decomposable = invariance_residual <= bound
        && range_residual <= bound
        && kernel_residual <= bound
        && b.a13.frobenius() <= bound;
    Ok(KrylovStructure {
        krylov_dim: basis.len(),
        basis: q,
        invariance_residual,
        range_residual,
        kernel_residual,
        decomposable,
    })
}

/// Log-equality residual (when `A₂₂` is invertible) together with the
/// Krylov structure.
pub fn diagnose(a: &SymMatrix, p: &Partition, tol: f64) -> Result<EqualityDiagnostics> {
    let b = blocks(a, p)?;
    let log_residual = match log_equality_residual(a, p) {
        Ok(d) => d.log_residual,
        Err(Error::Domain { .. }) => None,
        Err(e) => return Err(e),
    };
    let krylov = detect_structure(a, p, tol)?;
    Ok(EqualityDiagnostics {
        log_residual,
        a13_norm: b.a13.frobenius(),
        a12a23_norm: b.a12.matmul(&b.a23)?.frobenius(),
        decomposable: Some(krylov.decomposable),
        krylov: Some(krylov),
    })
}

/// `max_g ‖A₁₂ g(A₂₂) A₂₃‖_F` over polynomials given by ascending
/// coefficients, degree at most [`MAX_POLY_DEGREE`].
pub fn stone_weierstrass_check(a: &SymMatrix, p: &Partition, gs: &[Vec<f64>]) -> Result<f64> {
    let b = blocks(a, p)?;
    let a22 = b.a22.as_mat();
    let id = Mat::identity(p.d2);
    let mut worst = 0.0f64;
    for g in gs {
        if g.len() > MAX_POLY_DEGREE + 1 {
            return Err(Error::shape(format!(
                "polynomial degree {} exceeds {MAX_POLY_DEGREE}",
                g.len() - 1
            )));
        }
        // Horner in the matrix argument
        let mut acc = Mat::zeros(p.d2, p.d2);
        for &c in g.iter().rev() {
            acc = acc.matmul(a22)?.add(&id.scale(c))?;
        }
        let r = b.a12.matmul(&acc.matmul(&b.a23)?)?.frobenius();
        worst = worst.max(r);
    }
    Ok(worst)
}
