//! Small dense matrices over the rationals with exact elimination.

use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; returns `None` for ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| crate::rational::int(v)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Submatrix formed by the given rows and columns, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Determinant by fraction-free Gaussian elimination. Panics if not square.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| !a[(i, k)].is_zero()) else {
                return Rational::zero();
            };
            if piv != k {
                a.swap_rows(piv, k);
                det = -det;
            }
            let p = a[(k, k)].clone();
            det *= &p;
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] / &p;
                for j in k..n {
                    let v = &f * &a[(k, j)];
                    a[(i, j)] -= v;
                }
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(piv, rank);
            let p = a[(rank, col)].clone();
            for i in rank + 1..self.rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = &a[(i, col)] / &p;
                for j in col..self.cols {
                    let v = &f * &a[(rank, j)];
                    a[(i, j)] -= v;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Solves `self * x = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        assert!(self.is_square() && rhs.len() == self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.to_vec();
        for k in 0..n {
            let piv = (k..n).find(|&i| !a[(i, k)].is_zero())?;
            if piv != k {
                a.swap_rows(piv, k);
                b.swap(piv, k);
            }
            let p = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] / &p;
                for j in k..n {
                    let v = &f * &a[(k, j)];
                    a[(i, j)] -= v;
                }
                let v = &f * &b[k];
                b[i] -= v;
            }
        }
        let mut x = vec![Rational::zero(); n];
        for k in (0..n).rev() {
            let mut s = b[k].clone();
            for j in k + 1..n {
                s -= &a[(k, j)] * &x[j];
            }
            x[k] = s / &a[(k, k)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).fold(Rational::zero(), |s, t| s + t))
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        QMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |s, k| s + &self[(i, k)] * &rhs[(k, j)])
        })
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v).collect() }
    }
}

/// Row-major list of rational strings.
impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<RationalRepr>> = Vec::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(RationalRepr::into_rational).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        QMatrix::from_rows(rows).ok_or_else(|| D::Error::custom("ragged matrix rows"))
    }
}

/// A rational given either as a JSON string or a JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum RationalRepr {
    Text(String),
    Int(i64),
}

impl RationalRepr {
    pub(crate) fn into_rational(self) -> Result<Rational, crate::rational::ParseRationalError> {
        match self {
            RationalRepr::Text(s) => parse_rational(&s),
            RationalRepr::Int(v) => Ok(crate::rational::int(v)),
        }
    }
}
