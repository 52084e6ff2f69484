//! Exact rational linear algebra for small fixtures, and the exact
//! reproduction of the three-by-three counterexample for `f(t) = −1/t`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::functions::parse_function;
use crate::matcore::{Partition, SymMatrix};
use crate::ssa::{ssa_gap, Form, DEFAULT_TOL_REL};

pub type Rational = BigRational;

/// Largest dimension accepted by the exact kernel.
pub const MAX_EXACT_DIM: usize = 12;

/// `"num/den"`, denominator always shown.
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Square matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| fmt_rational(self.get(i, j))).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl RatMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self> {
        if n == 0 || n > MAX_EXACT_DIM {
            return Err(Error::ParamOutOfRange(format!(
                "exact matrices need 1 <= dim <= {MAX_EXACT_DIM}, got {n}"
            )));
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Ok(RatMatrix { n, data })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::shape("exact matrix must be square"));
        }
        RatMatrix::from_fn(n, |i, j| Rational::from_integer(BigInt::from(rows[i][j])))
    }

    pub fn identity(n: usize) -> Result<Self> {
        RatMatrix::from_fn(n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.n != rhs.n {
            return Err(Error::shape(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.n, rhs.n
            )));
        }
        RatMatrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(Rational::zero(), |acc, k| {
                acc + self.get(i, k) * rhs.get(k, j)
            })
        })
    }

    /// Principal submatrix on `r`.
    pub fn principal(&self, r: std::ops::Range<usize>) -> Result<RatMatrix> {
        let start = r.start;
        RatMatrix::from_fn(r.len(), |i, j| self.get(start + i, start + j).clone())
    }

    pub fn to_sym(&self) -> Result<SymMatrix> {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| to_f64(self.get(i, j))).collect())
            .collect();
        SymMatrix::from_rows(&rows)
    }
}

pub fn rat_trace(m: &RatMatrix) -> Rational {
    (0..m.n).fold(Rational::zero(), |acc, i| acc + m.get(i, i))
}

/// Determinant by Bareiss elimination. Every division in the recurrence is
/// exact, so intermediates stay as small as the minors they represent.
pub fn rat_det(m: &RatMatrix) -> Rational {
    let n = m.n;
    let mut a = m.data.clone();
    let mut sign = Rational::one();
    let mut prev = Rational::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return Rational::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

/// Exact inverse by Gauss–Jordan elimination on `[M | I]`.
pub fn rat_inverse(m: &RatMatrix) -> Result<RatMatrix> {
    let n = m.n;
    let w = 2 * n;
    let mut aug: Vec<Rational> = Vec::with_capacity(n * w);
    for i in 0..n {
        aug.extend((0..n).map(|j| m.get(i, j).clone()));
        aug.extend((0..n).map(|j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
    }
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !aug[r * w + col].is_zero()) else {
            return Err(Error::Singular);
        };
        if p != col {
            for j in 0..w {
                aug.swap(col * w + j, p * w + j);
            }
        }
        let pivot = aug[col * w + col].clone();
        for j in 0..w {
            aug[col * w + j] = &aug[col * w + j] / &pivot;
        }
        for r in 0..n {
            if r == col || aug[r * w + col].is_zero() {
                continue;
            }
            let factor = aug[r * w + col].clone();
            for j in 0..w {
                let v = &aug[r * w + j] - &factor * &aug[col * w + j];
                aug[r * w + j] = v;
            }
        }
    }
    RatMatrix::from_fn(n, |i, j| aug[i * w + n + j].clone())
}

/// Exact record of the counterexample, with the floating-point pipeline's
/// answer alongside.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AndoReport {
    #[serde(serialize_with = "ser_rational", rename = "tr_A_inv")]
    pub tr_a_inv: Rational,
    #[serde(serialize_with = "ser_rational", rename = "tr_B_inv")]
    pub tr_b_inv: Rational,
    #[serde(serialize_with = "ser_rational", rename = "tr_C_inv")]
    pub tr_c_inv: Rational,
    #[serde(serialize_with = "ser_rational", rename = "tr_A22_inv")]
    pub tr_a22_inv: Rational,
    /// `Tr f(B) + Tr f(C) − Tr f(A) − Tr f(A₂₂)` for `f(t) = −1/t`.
    #[serde(serialize_with = "ser_rational")]
    pub gap: Rational,
    #[serde(rename = "X")]
    pub x: RatMatrix,
    #[serde(rename = "A")]
    pub a: RatMatrix,
    pub float_gap: f64,
    pub float_abs_err: f64,
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

/// The fixture `X`; the counterexample matrix is `A = X⁻¹`.
pub fn ando_fixture() -> RatMatrix {
    RatMatrix::from_integers(&[vec![4, 8, -2], vec![8, 20, 0], vec![-2, 0, 9]])
        .expect("3x3 fixture")
}

pub fn ando_report() -> Result<AndoReport> {
    let x = ando_fixture();
    let a = rat_inverse(&x)?;
    let b = a.principal(0..2)?;
    let c = a.principal(1..3)?;
    let a22 = a.principal(1..2)?;
    let tr_a_inv = rat_trace(&x);
    let tr_b_inv = rat_trace(&rat_inverse(&b)?);
    let tr_c_inv = rat_trace(&rat_inverse(&c)?);
    let tr_a22_inv = rat_trace(&rat_inverse(&a22)?);
    // −Tr B⁻¹ − Tr C⁻¹ + Tr A⁻¹ + Tr A₂₂⁻¹
    let gap = &tr_a_inv + &tr_a22_inv - &tr_b_inv - &tr_c_inv;

    let f = parse_function("neg_inverse")?;
    let float = ssa_gap(
        &f,
        &a.to_sym()?,
        &Partition::new(1, 1, 1),
        Form::Compressed,
        DEFAULT_TOL_REL,
    )?;
    let float_abs_err = (float.gap - to_f64(&gap)).abs();
    Ok(AndoReport {
        tr_a_inv,
        tr_b_inv,
        tr_c_inv,
        tr_a22_inv,
        gap,
        x,
        a,
        float_gap: float.gap,
        float_abs_err,
    })
}

/// `|q|` as an `f64`, for error summaries.
pub fn abs_f64(q: &Rational) -> f64 {
    to_f64(&q.abs())
}
