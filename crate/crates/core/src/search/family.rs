use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{Mat, Partition, SymMatrix};
use crate::rng::gram_plus_floor;

/// Instance families. Each maps a flat vector of standard-normal parameters
/// to a positive definite matrix, so the same parameterization drives both
/// sampling and local search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `GᵀG + eps·I`.
    GenericSpd,
    /// `A₁₂ = 0` and `A₂₃ = 0`; only `A₁₃` couples the outer blocks.
    ArrowAbcd,
    /// `A₂₃ = 0` exactly.
    A23Zero,
    /// `A₁₃ = A₁₂A₂₂⁻¹A₂₃`.
    LogEquality,
    /// Two independent blocks across a split of the middle space, rotated
    /// within it.
    TriviBlock,
    /// `GᵀG + eps·I` with one row of `G` zeroed, so the smallest eigenvalue is
    /// exactly the floor.
    NearSingular,
    /// Diagonal with entries `p² + eps`.
    Diagonal,
}

pub const FAMILIES: &[Family] = &[
    Family::GenericSpd,
    Family::ArrowAbcd,
    Family::A23Zero,
    Family::LogEquality,
    Family::TriviBlock,
    Family::NearSingular,
    Family::Diagonal,
];

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GenericSpd => "generic_spd",
            Family::ArrowAbcd => "arrow_abcd",
            Family::A23Zero => "a23_zero",
            Family::LogEquality => "log_equality",
            Family::TriviBlock => "trivi_block",
            Family::NearSingular => "near_singular",
            Family::Diagonal => "diagonal",
        }
    }

    /// Length of the parameter vector for `dims`.
    pub fn param_len(self, p: &Partition) -> usize {
        let (d1, d2, d3) = (p.d1, p.d2, p.d3);
        let n = p.dim();
        match self {
            Family::GenericSpd | Family::A23Zero | Family::NearSingular => n * n,
            Family::Diagonal => n,
            Family::ArrowAbcd => (d1 + d3) * (d1 + d3) + d2 * d2,
            Family::LogEquality => d2 * d2 + d1 * d2 + d2 * d3 + d1 * d1 + d3 * d3,
            Family::TriviBlock => 1 + (d1 + d2) * (d1 + d2) + (d2 + d3) * (d2 + d3) + d2 * d2,
        }
    }

    /// Builds the matrix for `params`, which must have
    /// [`param_len`](Self::param_len) entries.
    pub fn build(self, params: &[f64], p: &Partition, eps: f64) -> Result<SymMatrix> {
        if params.len() != self.param_len(p) {
            return Err(Error::shape(format!(
                "{} needs {} parameters, got {}",
                self.name(),
                self.param_len(p),
                params.len()
            )));
        }
        let (d1, d2, d3) = (p.d1, p.d2, p.d3);
        let n = p.dim();
        let mut cursor = Cursor { params, at: 0 };
        Ok(match self {
            Family::GenericSpd => gram_plus_floor(&cursor.square(n), eps),
            Family::NearSingular => {
                let mut g = cursor.square(n);
                for j in 0..n {
                    g[(n - 1, j)] = 0.0;
                }
                gram_plus_floor(&g, eps)
            }
            Family::Diagonal => {
                let d: Vec<f64> = params.iter().map(|v| v * v + eps).collect();
                SymMatrix::diagonal(&d)
            }
            Family::A23Zero => {
                // block-2 columns live on the first d1+d2 rows of G and block-3
                // columns on the rest, so their inner products vanish exactly
                let mut g = cursor.square(n);
                let split = d1 + d2;
                for i in 0..n {
                    for j in p.range2() {
                        if i >= split {
                            g[(i, j)] = 0.0;
                        }
                    }
                    for j in p.range3() {
                        if i < split {
                            g[(i, j)] = 0.0;
                        }
                    }
                }
                gram_plus_floor(&g, eps)
            }
            Family::ArrowAbcd => {
                let outer = gram_plus_floor(&cursor.square(d1 + d3), eps);
                let middle = gram_plus_floor(&cursor.square(d2), eps);
                let pos = |i: usize| {
                    if i < d1 {
                        Some(i)
                    } else if i >= d1 + d2 {
                        Some(i - d2)
                    } else {
                        None
                    }
                };
                SymMatrix::from_upper(n, |i, j| match (pos(i), pos(j)) {
                    (Some(a), Some(b)) => outer.get(a, b),
                    (None, None) => middle.get(i - d1, j - d1),
                    _ => 0.0,
                })
            }
            Family::LogEquality => log_equality(&mut cursor, p, eps)?,
            Family::TriviBlock => trivi_block(&mut cursor, p, eps),
        })
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FAMILIES
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = FAMILIES.iter().map(|f| f.name()).collect();
                Error::ParamOutOfRange(format!(
                    "unknown family `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

struct Cursor<'a> {
    params: &'a [f64],
    at: usize,
}

impl Cursor<'_> {
    fn take(&mut self, rows: usize, cols: usize) -> Mat {
        let m = Mat::from_fn(rows, cols, |i, j| self.params[self.at + i * cols + j]);
        self.at += rows * cols;
        m
    }

    fn square(&mut self, n: usize) -> Mat {
        self.take(n, n)
    }
}

/// Draws `A₂₂ = LLᵀ` and free factors `V`, `W`, then sets `A₁₂ = VᵀLᵀ`,
/// `A₂₃ = LW` and `A₁₃ = VᵀW`, so that `A₁₃ = A₁₂A₂₂⁻¹A₂₃` holds without
/// forming an inverse. The outer diagonal blocks are `VᵀV + S₁` and
/// `WᵀW + S₃` with `S₁`, `S₃` positive definite, which makes the Schur
/// complement of `A₂₂` equal to `S₁ ⊕ S₃`.
fn log_equality(cursor: &mut Cursor<'_>, p: &Partition, eps: f64) -> Result<SymMatrix> {
    let (d1, d2, d3) = (p.d1, p.d2, p.d3);
    let a22 = gram_plus_floor(&cursor.square(d2), eps);
    let v = cursor.take(d2, d1);
    let w = cursor.take(d2, d3);
    let s1 = gram_plus_floor(&cursor.square(d1), eps);
    let s3 = gram_plus_floor(&cursor.square(d3), eps);
    let l = a22.as_mat().cholesky()?;
    let a12 = l.matmul(&v)?.transpose();
    let a23 = l.matmul(&w)?;
    let a11 = v.tr_matmul(&v)?;
    let a13 = v.tr_matmul(&w)?;
    let a33 = w.tr_matmul(&w)?;
    let n = p.dim();
    let (r2, r3) = (p.range2(), p.range3());
    Ok(SymMatrix::from_upper(n, |i, j| {
        let (i2, j2) = (r2.contains(&i), r2.contains(&j));
        let (i3, j3) = (r3.contains(&i), r3.contains(&j));
        let (i1, j1) = (!i2 && !i3, !j2 && !j3);
        if i1 && j1 {
            a11[(i, j)] + s1.get(i, j)
        } else if i1 && j2 {
            a12[(i, j - d1)]
        } else if i1 && j3 {
            a13[(i, j - d1 - d2)]
        } else if i2 && j2 {
            a22.get(i - d1, j - d1)
        } else if i2 && j3 {
            a23[(i - d1, j - d1 - d2)]
        } else {
            a33[(i - d1 - d2, j - d1 - d2)] + s3.get(i - d1 - d2, j - d1 - d2)
        }
    }))
}

/// Orthonormalizes the columns of a square Gaussian matrix (modified
/// Gram–Schmidt, two passes). Falls back to the identity column if a draw is
/// degenerate.
fn orthogonal_from(g: &Mat) -> Mat {
    let n = g.rows();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let c: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
        } else {
            v = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        }
        cols.push(v);
    }
    Mat::from_fn(n, n, |i, j| cols[j][i])
}

/// `(H₁ ⊕ H₂ₗ) ⊕ (H₂ᵣ ⊕ H₃)` block-diagonal, then rotated by an orthogonal
/// `Q` acting on the middle space only. The split `k = dim H₂ₗ` comes from
/// the first parameter.
fn trivi_block(cursor: &mut Cursor<'_>, p: &Partition, eps: f64) -> SymMatrix {
    let (d1, d2, d3) = (p.d1, p.d2, p.d3);
    let first = cursor.params[0];
    cursor.at = 1;
    let k = (((first.tanh() + 1.0) * 0.5 * (d2 + 1) as f64) as usize).min(d2);
    let left_full = cursor.square(d1 + d2);
    let right_full = cursor.square(d2 + d3);
    let q = orthogonal_from(&cursor.square(d2));
    let (nl, nr) = (d1 + k, d2 - k + d3);
    let left = gram_plus_floor(&left_full.slice(0..nl, 0..nl), eps);
    let right = gram_plus_floor(&right_full.slice(0..nr, 0..nr), eps);
    let n = p.dim();
    let base = Mat::from_fn(n, n, |i, j| match (i < nl, j < nl) {
        (true, true) => left.get(i, j),
        (false, false) => right.get(i - nl, j - nl),
        _ => 0.0,
    });
    let u = Mat::from_fn(n, n, |i, j| {
        if p.range2().contains(&i) && p.range2().contains(&j) {
            q[(i - d1, j - d1)]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    });
    let rotated = u
        .matmul(&base)
        .and_then(|m| m.matmul(&u.transpose()))
        .expect("conformable square matrices");
    SymMatrix::from_mat_unchecked(&rotated)
}
