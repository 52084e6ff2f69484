use super::{Mat, SymMatrix};
use crate::error::{Error, Result};
use crate::functions::ScalarFn;

/// Sweep budget of the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Converged once `max |aₚq| <= OFF_DIAG_TOL · ‖A‖_F`.
pub const OFF_DIAG_TOL: f64 = 1e-14;

/// Eigenvalues in ascending order, with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigDecomp {
    pub eigenvalues: Vec<f64>,
    pub vectors: Mat,
}

impl EigDecomp {
    /// Spectral norm `max |λᵢ|`.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::INFINITY)
    }

    /// `V · diag(values) · Vᵀ`.
    pub fn reconstruct(&self, values: &[f64]) -> SymMatrix {
        let n = self.eigenvalues.len();
        let v = &self.vectors;
        SymMatrix::from_upper(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * values[k] * v[(j, k)]).sum()
        })
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Each sweep visits every off-diagonal pair once and annihilates it with a
/// plane rotation; rotations are accumulated into `V`. Iteration stops when the
/// largest off-diagonal magnitude falls below `1e-14·‖A‖_F`, or fails with
/// [`Error::Convergence`] after [`MAX_SWEEPS`] sweeps.
pub fn eig_sym(a: &SymMatrix) -> Result<EigDecomp> {
    let n = a.dim();
    let mut m = a.as_mat().clone();
    let mut v = Mat::identity(n);
    let threshold = OFF_DIAG_TOL * a.frobenius();

    let max_off = |m: &Mat| {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        off
    };

    let mut sweeps = 0;
    loop {
        let off = max_off(&m);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence {
                sweeps,
                off_diag: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[(r, p)];
                    let arq = m[(r, q)];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    m[(r, p)] = new_rp;
                    m[(p, r)] = new_rp;
                    m[(r, q)] = new_rq;
                    m[(q, r)] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(EigDecomp {
        eigenvalues,
        vectors,
    })
}

/// Tolerance for clamping eigenvalues that rounding pushed just outside a
/// function's domain.
pub fn clamp_tol(spectral_norm: f64) -> f64 {
    1e-12 * spectral_norm.max(1.0)
}

fn spectral_values(f: &ScalarFn, eig: &EigDecomp) -> Result<Vec<f64>> {
    let tol = clamp_tol(eig.spectral_norm());
    eig.eigenvalues
        .iter()
        .map(|&lambda| f.eval_clamped(lambda, tol))
        .collect()
}

/// `f(A) = V · diag(f(λᵢ)) · Vᵀ`.
pub fn apply_spectral(f: &ScalarFn, a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eig_sym(a)?;
    let values = spectral_values(f, &eig)?;
    Ok(eig.reconstruct(&values))
}

/// `Tr f(A) = Σ f(λᵢ)`. The trace of an empty block is zero.
pub fn trace_f(f: &ScalarFn, a: &SymMatrix) -> Result<f64> {
    if a.dim() == 0 {
        return Ok(0.0);
    }
    let eig = eig_sym(a)?;
    Ok(spectral_values(f, &eig)?.iter().sum())
}

/// Eigenvalues only, ascending. Empty for a 0x0 block.
pub fn eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    if a.dim() == 0 {
        return Ok(Vec::new());
    }
    Ok(eig_sym(a)?.eigenvalues)
}
