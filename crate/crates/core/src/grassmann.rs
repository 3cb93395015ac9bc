//! Plücker coordinates, the osculating matrix `E(z)` and the determinant form
//! of the Wronski map on `G(m, m+p)`.
//!
//! A point of the Grassmannian is the row space of a rank-`m` matrix `K` of
//! size `m x (m+p)`. Its image is the polynomial `det [E(z); K]`, where row `j`
//! of `E(z)` is the `j`-th derivative of `(z^{m+p-1}, ..., z, 1)`. On the big
//! cell `K = [k | I]` this is, up to a constant, the Wronskian of
//! `f_j = z^{m+p-j} - k_{1j} z^{m-1} - ... - k_{mj}`.

use crate::linalg::QMatrix;
use crate::polynomials::{PolyMatrix, RationalPoly};
use crate::rational::{int, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrassmannError {
    #[error("expected a {rows}x{cols} matrix, got {got_rows}x{got_cols}")]
    Shape { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("matrix has rank {rank}, below m = {m}")]
    RankDeficient { rank: usize, m: usize },
    #[error("m and p must be positive")]
    ZeroSize,
}

/// Full-rank `m x (m+p)` matrix representing a point of `G(m, m+p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixKJson", into = "MatrixKJson")]
pub struct MatrixK {
    m: usize,
    p: usize,
    entries: QMatrix,
}

#[derive(Serialize, Deserialize)]
struct MatrixKJson {
    m: usize,
    p: usize,
    entries: QMatrix,
}

impl TryFrom<MatrixKJson> for MatrixK {
    type Error = GrassmannError;
    fn try_from(j: MatrixKJson) -> Result<Self, GrassmannError> {
        MatrixK::new(j.m, j.p, j.entries)
    }
}

impl From<MatrixK> for MatrixKJson {
    fn from(k: MatrixK) -> Self {
        MatrixKJson { m: k.m, p: k.p, entries: k.entries }
    }
}

impl MatrixK {
    pub fn new(m: usize, p: usize, entries: QMatrix) -> Result<Self, GrassmannError> {
        if m == 0 || p == 0 {
            return Err(GrassmannError::ZeroSize);
        }
        if entries.nrows() != m || entries.ncols() != m + p {
            return Err(GrassmannError::Shape {
                rows: m,
                cols: m + p,
                got_rows: entries.nrows(),
                got_cols: entries.ncols(),
            });
        }
        let rank = entries.rank();
        if rank < m {
            return Err(GrassmannError::RankDeficient { rank, m });
        }
        Ok(MatrixK { m, p, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn entries(&self) -> &QMatrix {
        &self.entries
    }

    /// Minor on the last `m` columns.
    pub fn right_minor(&self) -> Rational {
        let rows: Vec<usize> = (0..self.m).collect();
        let cols: Vec<usize> = (self.p..self.m + self.p).collect();
        self.entries.select(&rows, &cols).det()
    }

    pub fn in_big_cell(&self) -> bool {
        !self.right_minor().is_zero()
    }

    /// Normalizes the right block to the identity, if it is invertible.
    pub fn to_big_cell(&self) -> Option<BigCellPoint> {
        let rows: Vec<usize> = (0..self.m).collect();
        let right = self.entries.select(&rows, &(self.p..self.m + self.p).collect::<Vec<_>>());
        let inv = right.inverse()?;
        let left = self.entries.select(&rows, &(0..self.p).collect::<Vec<_>>());
        Some(BigCellPoint { m: self.m, p: self.p, kcoef: &inv * &left })
    }

    /// `U K` for an invertible `m x m` matrix `U`.
    pub fn left_mul(&self, u: &QMatrix) -> Result<Self, GrassmannError> {
        MatrixK::new(self.m, self.p, u * &self.entries)
    }
}

/// Column subsets of size `m` from `0..n` in colexicographic order.
pub fn column_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(c + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// Maximal minors of `K`, indexed by column subsets in colexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluckerVector {
    pub m: usize,
    pub p: usize,
    pub subsets: Vec<Vec<usize>>,
    pub coordinates: Vec<Rational>,
}

#[derive(Serialize)]
struct PluckerEntry {
    /// 1-based column labels
    subset: Vec<usize>,
    value: String,
}

impl Serialize for PluckerVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            m: usize,
            p: usize,
            order: &'static str,
            coordinates: Vec<PluckerEntry>,
        }
        Out {
            m: self.m,
            p: self.p,
            order: "colex",
            coordinates: self
                .subsets
                .iter()
                .zip(&self.coordinates)
                .map(|(sub, v)| PluckerEntry {
                    subset: sub.iter().map(|c| c + 1).collect(),
                    value: crate::rational::format_rational(v),
                })
                .collect(),
        }
        .serialize(s)
    }
}

pub fn plucker(k: &MatrixK) -> PluckerVector {
    let subsets = column_subsets(k.m + k.p, k.m);
    let rows: Vec<usize> = (0..k.m).collect();
    let coordinates = subsets.iter().map(|s| k.entries.select(&rows, s).det()).collect();
    PluckerVector { m: k.m, p: k.p, subsets, coordinates }
}

/// The coordinate subspace spanned by the unit rows `e_c`, `c` in `subset`.
pub fn coordinate_subspace(m: usize, p: usize, subset: &[usize]) -> MatrixK {
    let entries = QMatrix::from_fn(m, m + p, |i, j| if subset[i] == j { Rational::one() } else { Rational::zero() });
    MatrixK::new(m, p, entries).expect("unit rows have full rank")
}

fn falling_factorial(e: usize, r: usize) -> i64 {
    (e + 1 - r..=e).map(|v| v as i64).product()
}

/// `E(z)` evaluated at `z0`: a `p x (m+p)` rational matrix.
pub fn osculating_e(z0: &Rational, m: usize, p: usize) -> QMatrix {
    let n = m + p;
    QMatrix::from_fn(p, n, |r, c| {
        let e = n - 1 - c;
        if e < r {
            Rational::zero()
        } else {
            int(falling_factorial(e, r)) * num_traits::pow(z0.clone(), e - r)
        }
    })
}

/// `E(z)` as a symbolic polynomial matrix.
pub fn osculating_e_poly(m: usize, p: usize) -> PolyMatrix {
    let n = m + p;
    let rows = (0..p)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let e = n - 1 - c;
                    if e < r {
                        RationalPoly::zero()
                    } else {
                        RationalPoly::monomial(int(falling_factorial(e, r)), e - r)
                    }
                })
                .collect()
        })
        .collect();
    PolyMatrix::from_rows(rows)
}

/// `det [E(z); K]` without normalization.
pub fn wronski_determinant(k: &MatrixK) -> RationalPoly {
    osculating_e_poly(k.m, k.p).stack(&PolyMatrix::constant(&k.entries)).det()
}

/// The Wronski map, scaled so that the leading coefficient is positive.
pub fn wronski_map(k: &MatrixK) -> RationalPoly {
    wronski_determinant(k).with_positive_leading()
}

/// Big-cell coordinates `(k_{ij})`, an `m x p` matrix; the point is `[k | I]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigCellPoint {
    pub m: usize,
    pub p: usize,
    pub kcoef: QMatrix,
}

impl BigCellPoint {
    pub fn new(m: usize, p: usize, kcoef: QMatrix) -> Result<Self, GrassmannError> {
        if kcoef.nrows() != m || kcoef.ncols() != p {
            return Err(GrassmannError::Shape { rows: m, cols: p, got_rows: kcoef.nrows(), got_cols: kcoef.ncols() });
        }
        Ok(BigCellPoint { m, p, kcoef })
    }

    pub fn zero(m: usize, p: usize) -> Self {
        BigCellPoint { m, p, kcoef: QMatrix::zeros(m, p) }
    }

    /// `[k | I]`
    pub fn to_matrix(&self) -> MatrixK {
        let entries = QMatrix::from_fn(self.m, self.m + self.p, |i, j| {
            if j < self.p {
                self.kcoef[(i, j)].clone()
            } else if j - self.p == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        MatrixK { m: self.m, p: self.p, entries }
    }

    /// Coefficients in the fixed order `k_{1,1}, ..., k_{m,1}, k_{1,2}, ...`
    /// (polynomial by polynomial).
    pub fn flatten(&self) -> Vec<Rational> {
        (0..self.p).flat_map(|j| (0..self.m).map(move |i| (i, j))).map(|ij| self.kcoef[ij].clone()).collect()
    }

    pub fn from_flat(m: usize, p: usize, v: &[Rational]) -> Self {
        assert_eq!(v.len(), m * p);
        BigCellPoint { m, p, kcoef: QMatrix::from_fn(m, p, |i, j| v[j * m + i].clone()) }
    }
}

/// `f_{j,K}(z) = z^{m+p-j} - k_{1,j} z^{m-1} - ... - k_{m,j}` for `j = 1..p`.
pub fn big_cell_polys(b: &BigCellPoint) -> Vec<RationalPoly> {
    let (m, p) = (b.m, b.p);
    (0..p)
        .map(|j| {
            let mut coeffs = vec![Rational::zero(); m + p - j];
            coeffs[m + p - j - 1] = Rational::one();
            for i in 0..m {
                coeffs[m - 1 - i] = -b.kcoef[(i, j)].clone();
            }
            RationalPoly::from_coeffs(coeffs)
        })
        .collect()
}

/// Leading coefficient of the Wronskian of `z^{m+p-1}, ..., z^m`: the
/// constant `L` with `W(big_cell_polys(b)) = L z^{mp} + ...` for every `b`.
pub fn big_cell_leading(m: usize, p: usize) -> Rational {
    let degs: Vec<i64> = (0..p).map(|j| (m + p - 1 - j) as i64).collect();
    let mut v = Rational::one();
    for a in 0..p {
        for b in a + 1..p {
            v *= int(degs[b] - degs[a]);
        }
    }
    v
}
