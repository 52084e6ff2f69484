use std::ops::Range;

use serde::Serialize;

use super::Mat;
use crate::error::{Error, Result};

/// Relative asymmetry above which input matrices are rejected.
pub const ASYMMETRY_TOL: f64 = 1e-8;

/// Dense real symmetric matrix. Entries are exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    inner: Mat,
    asymmetry: f64,
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.inner.serialize(serializer)
    }
}

impl SymMatrix {
    /// Symmetrize `m` as `(M + Mᵀ)/2`, recording `max |Mᵢⱼ − Mⱼᵢ|`.
    ///
    /// Rejects non-square or non-finite input, and input whose asymmetry exceeds
    /// `1e-8 · max |Mᵢⱼ|`.
    pub fn new(m: Mat) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::shape(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(Error::shape("dimension must be at least 1"));
        }
        if let Some(v) = m.as_slice().iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(*v, "matrix entries must be finite"));
        }
        let n = m.rows();
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > ASYMMETRY_TOL * m.max_abs() {
            return Err(Error::Asymmetric { asymmetry: asym });
        }
        let inner = Mat::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        });
        Ok(SymMatrix {
            inner,
            asymmetry: asym,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymMatrix::new(Mat::from_rows(rows)?)
    }

    /// Builds from the upper triangle given by `f(i, j)` for `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix {
            inner: m,
            asymmetry: 0.0,
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            inner: Mat::identity(n),
            asymmetry: 0.0,
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SymMatrix::from_upper(n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Wraps a square matrix that is symmetric by construction, symmetrizing
    /// away rounding residue. Callers guarantee finiteness.
    pub(crate) fn from_mat_unchecked(m: &Mat) -> Self {
        let n = m.rows();
        SymMatrix::from_upper(n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        })
    }

    /// Empty 0x0 operator, the compression onto a zero-dimensional block.
    pub(crate) fn empty() -> Self {
        SymMatrix {
            inner: Mat::zeros(0, 0),
            asymmetry: 0.0,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.inner
    }

    pub fn into_mat(self) -> Mat {
        self.inner
    }

    /// Asymmetry measure recorded at construction.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.inner.frobenius()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    /// Principal submatrix on the index range `r`.
    pub fn principal(&self, r: Range<usize>) -> SymMatrix {
        if r.is_empty() {
            return SymMatrix::empty();
        }
        SymMatrix {
            inner: self.inner.slice(r.clone(), r),
            asymmetry: 0.0,
        }
    }

    /// `P·A·P` for the coordinate projection onto `r`, kept at full dimension.
    pub fn zero_padded(&self, r: Range<usize>) -> SymMatrix {
        let n = self.dim();
        SymMatrix::from_upper(n, |i, j| {
            if r.contains(&i) && r.contains(&j) {
                self.get(i, j)
            } else {
                0.0
            }
        })
    }

    /// Matrix with coordinates listed in reverse order.
    pub fn reversed(&self) -> SymMatrix {
        let n = self.dim();
        SymMatrix::from_upper(n, |i, j| self.get(n - 1 - i, n - 1 - j))
    }

    /// `A + s·I`.
    pub fn shifted(&self, s: f64) -> SymMatrix {
        let mut m = self.inner.clone();
        for i in 0..self.dim() {
            m[(i, i)] += s;
        }
        SymMatrix {
            inner: m,
            asymmetry: self.asymmetry,
        }
    }
}

/// Split of the coordinate space into three consecutive blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

/// Which of the three coordinate projections to apply in the projected form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projector {
    P12,
    P2,
    P23,
}

impl Partition {
    pub fn new(d1: usize, d2: usize, d3: usize) -> Self {
        Partition { d1, d2, d3 }
    }

    pub fn dim(&self) -> usize {
        self.d1 + self.d2 + self.d3
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.d1, self.d2, self.d3]
    }

    pub fn check(&self, a: &SymMatrix) -> Result<()> {
        if self.dim() != a.dim() {
            return Err(Error::shape(format!(
                "partition {},{},{} does not match matrix dimension {}",
                self.d1,
                self.d2,
                self.d3,
                a.dim()
            )));
        }
        Ok(())
    }

    pub fn range1(&self) -> Range<usize> {
        0..self.d1
    }

    pub fn range2(&self) -> Range<usize> {
        self.d1..self.d1 + self.d2
    }

    pub fn range3(&self) -> Range<usize> {
        self.d1 + self.d2..self.dim()
    }

    pub fn range12(&self) -> Range<usize> {
        0..self.d1 + self.d2
    }

    pub fn range23(&self) -> Range<usize> {
        self.d1..self.dim()
    }

    pub fn reversed(&self) -> Partition {
        Partition::new(self.d3, self.d2, self.d1)
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::shape(format!(
                "partition must be three comma-separated integers, got `{s}`"
            )));
        }
        let mut d = [0usize; 3];
        for (slot, p) in d.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::shape(format!("invalid block size `{p}`")))?;
        }
        Ok(Partition::new(d[0], d[1], d[2]))
    }
}

/// The six distinct blocks of a 3x3 block-partitioned symmetric matrix.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub a11: SymMatrix,
    pub a12: Mat,
    pub a13: Mat,
    pub a22: SymMatrix,
    pub a23: Mat,
    pub a33: SymMatrix,
}

impl Blocks {
    /// Reassembles the full matrix from its blocks.
    pub fn assemble(&self) -> SymMatrix {
        let (d1, d2, d3) = (self.a11.dim(), self.a22.dim(), self.a33.dim());
        let off = [0, d1, d1 + d2];
        let block = |k: usize| {
            if k < off[1] {
                0
            } else if k < off[2] {
                1
            } else {
                2
            }
        };
        SymMatrix::from_upper(d1 + d2 + d3, |i, j| {
            let (bi, bj) = (block(i), block(j));
            let (li, lj) = (i - off[bi], j - off[bj]);
            match (bi, bj) {
                (0, 0) => self.a11.get(li, lj),
                (0, 1) => self.a12[(li, lj)],
                (0, 2) => self.a13[(li, lj)],
                (1, 1) => self.a22.get(li, lj),
                (1, 2) => self.a23[(li, lj)],
                (2, 2) => self.a33.get(li, lj),
                _ => unreachable!("from_upper only visits i <= j"),
            }
        })
    }
}

pub fn blocks(a: &SymMatrix, p: &Partition) -> Result<Blocks> {
    p.check(a)?;
    let m = a.as_mat();
    Ok(Blocks {
        a11: a.principal(p.range1()),
        a12: m.slice(p.range1(), p.range2()),
        a13: m.slice(p.range1(), p.range3()),
        a22: a.principal(p.range2()),
        a23: m.slice(p.range2(), p.range3()),
        a33: a.principal(p.range3()),
    })
}

/// Leading `(d1+d2)` principal submatrix.
pub fn compress_b(a: &SymMatrix, p: &Partition) -> Result<SymMatrix> {
    p.check(a)?;
    Ok(a.principal(p.range12()))
}

/// Trailing `(d2+d3)` principal submatrix.
pub fn compress_c(a: &SymMatrix, p: &Partition) -> Result<SymMatrix> {
    p.check(a)?;
    Ok(a.principal(p.range23()))
}

/// Full-dimension `P·A·P` for the chosen projector.
pub fn project_form(a: &SymMatrix, p: &Partition, which: Projector) -> Result<SymMatrix> {
    p.check(a)?;
    let r = match which {
        Projector::P12 => p.range12(),
        Projector::P2 => p.range2(),
        Projector::P23 => p.range23(),
    };
    Ok(a.zero_padded(r))
}

/// Pinching `P A P + Q A Q` with `P` the projection onto the first `k`
/// coordinates: the off-diagonal blocks are zeroed.
pub fn pinch(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let n = a.dim();
    if k > n {
        return Err(Error::shape(format!(
            "pinch split {k} exceeds dimension {n}"
        )));
    }
    Ok(SymMatrix::from_upper(n, |i, j| {
        if (i < k) == (j < k) {
            a.get(i, j)
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ando() -> SymMatrix {
        SymMatrix::from_rows(&[
            vec![45.0 / 16.0, -9.0 / 8.0, 5.0 / 8.0],
            vec![-9.0 / 8.0, 0.5, -0.25],
            vec![5.0 / 8.0, -0.25, 0.25],
        ])
        .unwrap()
    }

    #[test]
    fn symmetrization_and_rejection() {
        let m = Mat::from_rows(&[vec![1.0, 2.0 + 1e-12], vec![2.0, 1.0]]).unwrap();
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        assert!(s.asymmetry() > 0.0);
        let bad = Mat::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).unwrap();
        assert!(matches!(SymMatrix::new(bad), Err(Error::Asymmetric { .. })));
        assert!(SymMatrix::new(Mat::zeros(0, 0)).is_err());
        assert!(SymMatrix::new(Mat::zeros(2, 3)).is_err());
    }

    #[test]
    fn blocks_of_3x3() {
        let a = ando();
        let b = blocks(&a, &Partition::new(1, 1, 1)).unwrap();
        assert_eq!(b.a11.get(0, 0), 45.0 / 16.0);
        assert_eq!(b.a12[(0, 0)], -9.0 / 8.0);
        assert_eq!(b.a13[(0, 0)], 5.0 / 8.0);
        assert_eq!(b.a22.get(0, 0), 0.5);
        assert_eq!(b.a23[(0, 0)], -0.25);
        assert_eq!(b.a33.get(0, 0), 0.25);
        assert_eq!(b.assemble(), a);
    }

    #[test]
    fn degenerate_partition_blocks() {
        let a = ando();
        let b = blocks(&a, &Partition::new(0, 3, 0)).unwrap();
        assert_eq!(b.a22, a);
        assert_eq!(b.a11.dim(), 0);
        assert_eq!(b.a33.dim(), 0);
        assert!(b.a12.is_empty() && b.a13.is_empty() && b.a23.is_empty());
        assert_eq!(b.assemble(), a);
        assert!(blocks(&a, &Partition::new(1, 1, 2)).is_err());
    }

    #[test]
    fn compressions() {
        let a = ando();
        let p = Partition::new(1, 1, 1);
        let b = compress_b(&a, &p).unwrap();
        assert_eq!(
            b,
            SymMatrix::from_rows(&[vec![45.0 / 16.0, -9.0 / 8.0], vec![-9.0 / 8.0, 0.5]]).unwrap()
        );
        let d = SymMatrix::diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(
            compress_b(&d, &p).unwrap(),
            SymMatrix::diagonal(&[1.0, 2.0])
        );
        assert_eq!(
            compress_c(&d, &p).unwrap(),
            SymMatrix::diagonal(&[2.0, 3.0])
        );
        let id = SymMatrix::identity(5);
        let p = Partition::new(2, 1, 2);
        assert_eq!(compress_b(&id, &p).unwrap(), SymMatrix::identity(3));
        assert_eq!(compress_c(&id, &p).unwrap(), SymMatrix::identity(3));
    }

    #[test]
    fn projected_forms() {
        let d = SymMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let p = Partition::new(1, 1, 1);
        assert_eq!(
            project_form(&d, &p, Projector::P12).unwrap(),
            SymMatrix::diagonal(&[1.0, 2.0, 0.0])
        );
        assert_eq!(
            project_form(&ando(), &p, Projector::P2).unwrap(),
            SymMatrix::diagonal(&[0.0, 0.5, 0.0])
        );
    }

    #[test]
    fn pinching() {
        let a = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(pinch(&a, 1).unwrap(), SymMatrix::identity(2));
        let d = SymMatrix::diagonal(&[3.0, 1.0, 2.0]);
        for k in 0..=3 {
            assert_eq!(pinch(&d, k).unwrap(), d);
        }
        let x = ando();
        let y = pinch(&x, 2).unwrap();
        assert_eq!(y.get(0, 2), 0.0);
        assert_eq!(y.get(1, 2), 0.0);
        assert_eq!(y.get(0, 1), x.get(0, 1));
        assert_eq!(y.trace(), x.trace());
        assert!(pinch(&x, 4).is_err());
    }

    #[test]
    fn partition_parse() {
        assert_eq!(
            "1,2,3".parse::<Partition>().unwrap(),
            Partition::new(1, 2, 3)
        );
        assert_eq!(
            " 0, 4 ,0".parse::<Partition>().unwrap(),
            Partition::new(0, 4, 0)
        );
        assert!("1,2".parse::<Partition>().is_err());
        assert!("1,-2,3".parse::<Partition>().is_err());
    }
}
