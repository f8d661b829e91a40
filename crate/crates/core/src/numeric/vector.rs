//! Vectors and square matrices over a number field.

use super::field::{NumberField, Scalar};
use super::NumericError;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;
use std::sync::Arc;

/// Column vector of field elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVec(pub Vec<Scalar>);

impl FVec {
    pub fn zero(field: &Arc<NumberField>, e: usize) -> Self {
        FVec(vec![Scalar::zero(field); e])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, o: &FVec) -> FVec {
        FVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &FVec) -> FVec {
        FVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> FVec {
        FVec(self.0.iter().map(|a| -a).collect())
    }

    /// Power-basis coordinates, component-major: index `c·n + t`.
    pub fn flat_coeffs(&self) -> Vec<BigRational> {
        self.0.iter().flat_map(|s| s.coeffs().iter().cloned()).collect()
    }

    pub fn from_flat(field: &Arc<NumberField>, flat: &[BigRational]) -> FVec {
        let n = field.degree();
        FVec(flat.chunks(n).map(|c| Scalar::new(field, c.to_vec())).collect())
    }
}

impl fmt::Debug for FVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Square matrix over a number field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    n: usize,
    rows: Vec<Vec<Scalar>>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter().map(|r| FVec(r.clone()))).finish()
    }
}

impl FMatrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, NumericError> {
        let n = rows.len();
        if n == 0 {
            return Err(NumericError::DimensionMismatch { expected: 1, found: 0 });
        }
        for r in &rows {
            if r.len() != n {
                return Err(NumericError::DimensionMismatch { expected: n, found: r.len() });
            }
        }
        let field = rows[0][0].field().clone();
        if rows.iter().flatten().any(|s| !s.field().same(&field)) {
            return Err(NumericError::FieldMismatch);
        }
        Ok(FMatrix { n, rows })
    }

    pub fn identity(field: &Arc<NumberField>, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Scalar::one(field) } else { Scalar::zero(field) })
                    .collect()
            })
            .collect();
        FMatrix { n, rows }
    }

    pub fn scalar(s: &Scalar, n: usize) -> Self {
        let mut m = FMatrix::identity(s.field(), n);
        for i in 0..n {
            m.rows[i][i] = s.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.rows[0][0].field()
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn mul(&self, o: &FMatrix) -> FMatrix {
        let f = self.field();
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        (0..self.n).fold(Scalar::zero(f), |acc, k| &acc + &(&self.rows[i][k] * &o.rows[k][j]))
                    })
                    .collect()
            })
            .collect();
        FMatrix { n: self.n, rows }
    }

    pub fn sub(&self, o: &FMatrix) -> FMatrix {
        let rows = self
            .rows
            .iter()
            .zip(&o.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        FMatrix { n: self.n, rows }
    }

    pub fn mul_vec(&self, v: &FVec) -> FVec {
        let f = self.field();
        FVec(
            self.rows
                .iter()
                .map(|r| r.iter().zip(&v.0).fold(Scalar::zero(f), |acc, (a, x)| &acc + &(a * x)))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> FMatrix {
        let mut acc = FMatrix::identity(self.field(), self.n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Row echelon reduction of `[self | rhs]`; returns the determinant and
    /// the reduced augmented rows, or `None` in the singular case.
    fn eliminate(&self, rhs: Vec<Vec<Scalar>>) -> Option<(Scalar, Vec<Vec<Scalar>>)> {
        let n = self.n;
        let f = self.field().clone();
        let mut a: Vec<Vec<Scalar>> = self
            .rows
            .iter()
            .zip(rhs)
            .map(|(r, b)| r.iter().cloned().chain(b).collect())
            .collect();
        let mut det = Scalar::one(&f);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            if pivot != col {
                a.swap(pivot, col);
                det = -&det;
            }
            det = &det * &a[col][col];
            let inv = a[col][col].inv().ok()?;
            for x in a[col].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let factor = a[r][col].clone();
                    let pivot_row = a[col].clone();
                    for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                        *x = &*x - &(&factor * p);
                    }
                }
            }
        }
        Some((det, a))
    }

    pub fn det(&self) -> Scalar {
        match self.eliminate(vec![Vec::new(); self.n]) {
            Some((d, _)) => d,
            None => Scalar::zero(self.field()),
        }
    }

    pub fn inverse(&self) -> Result<FMatrix, NumericError> {
        let id = FMatrix::identity(self.field(), self.n);
        let (_, a) = self.eliminate(id.rows).ok_or(NumericError::SingularMatrix)?;
        let rows = a.into_iter().map(|r| r[self.n..].to_vec()).collect();
        Ok(FMatrix { n: self.n, rows })
    }

    pub fn solve(&self, b: &FVec) -> Result<FVec, NumericError> {
        if b.len() != self.n {
            return Err(NumericError::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let rhs = b.0.iter().map(|x| vec![x.clone()]).collect();
        let (_, a) = self.eliminate(rhs).ok_or(NumericError::SingularMatrix)?;
        Ok(FVec(a.into_iter().map(|r| r[self.n].clone()).collect()))
    }

    /// The ℚ-linear map on `K^e` written in flattened power-basis
    /// coordinates (size `e·n`), component-major.
    pub fn flat_rational_matrix(&self) -> Vec<Vec<BigRational>> {
        let deg = self.field().degree();
        let size = self.n * deg;
        let mut out = vec![vec![BigRational::zero(); size]; size];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let m = s.multiplication_matrix();
                for (r, mrow) in m.iter().enumerate() {
                    for (c, v) in mrow.iter().enumerate() {
                        out[i * deg + r][j * deg + c] = v.clone();
                    }
                }
            }
        }
        out
    }
}
