//! Polynomial matrices, Wronskians and critical points.

use super::roots::{real_roots, RealInterval, RootList};
use super::RationalPoly;
use crate::linalg::QMatrix;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WronskianError {
    #[error("the Wronskian of an empty list is undefined")]
    Empty,
    #[error("polynomial index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("the pair is not coprime (gcd {0})")]
    NotCoprime(String),
}

/// Square or rectangular matrix with polynomial entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: Vec<Vec<RationalPoly>>,
}

impl PolyMatrix {
    pub fn from_rows(rows: Vec<Vec<RationalPoly>>) -> Self {
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == c), "ragged polynomial matrix");
        PolyMatrix { rows }
    }

    pub fn constant(m: &QMatrix) -> Self {
        Self::from_rows(
            m.to_rows().into_iter().map(|r| r.into_iter().map(RationalPoly::constant).collect()).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalPoly {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<RationalPoly>] {
        &self.rows
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &PolyMatrix) -> Self {
        assert_eq!(self.ncols(), below.ncols());
        let mut rows = self.rows.clone();
        rows.extend(below.rows.iter().cloned());
        PolyMatrix { rows }
    }

    /// Horizontal concatenation.
    pub fn augment(&self, right: &PolyMatrix) -> Self {
        assert_eq!(self.nrows(), right.nrows());
        PolyMatrix {
            rows: self.rows.iter().zip(&right.rows).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect(),
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        PolyMatrix { rows: self.rows.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect() }
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> Self {
        assert_eq!(self.ncols(), rhs.nrows());
        let rows = (0..self.nrows())
            .map(|i| {
                (0..rhs.ncols())
                    .map(|j| {
                        (0..self.ncols())
                            .fold(RationalPoly::zero(), |acc, k| &acc + &(&self.rows[i][k] * &rhs.rows[k][j]))
                    })
                    .collect()
            })
            .collect();
        PolyMatrix { rows }
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> Self {
        PolyMatrix {
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    /// Determinant by fraction-free Bareiss elimination over `Q[z]`.
    pub fn det(&self) -> RationalPoly {
        let n = self.nrows();
        assert_eq!(n, self.ncols(), "determinant of a non-square matrix");
        if n == 0 {
            return RationalPoly::one();
        }
        let mut a = self.rows.clone();
        let mut negate = false;
        let mut prev = RationalPoly::one();
        for k in 0..n - 1 {
            // lowest-degree nonzero pivot keeps the intermediate degrees small
            let Some(piv) = (k..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| a[i][k].degree().unwrap())
            else {
                return RationalPoly::zero();
            };
            if piv != k {
                a.swap(piv, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
                }
                a[i][k] = RationalPoly::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if negate { -&d } else { d }
    }
}

/// Wronskian matrix: row `r` holds the `r`-th derivatives of the inputs.
fn wronski_matrix(fs: &[RationalPoly]) -> PolyMatrix {
    let p = fs.len();
    let mut rows = Vec::with_capacity(p);
    let mut current: Vec<RationalPoly> = fs.to_vec();
    for _ in 0..p {
        rows.push(current.clone());
        current = current.iter().map(RationalPoly::derivative).collect();
    }
    PolyMatrix::from_rows(rows)
}

/// `W(f_1, ..., f_p) = det (f_j^{(i)})`.
pub fn wronskian(fs: &[RationalPoly]) -> Result<RationalPoly, WronskianError> {
    if fs.is_empty() {
        return Err(WronskianError::Empty);
    }
    Ok(wronski_matrix(fs).det())
}

/// Partial derivative of `W` in the coefficient of `z^l` of `f_i` (1-based
/// `i`), i.e. the Wronskian with `f_i` replaced by `z^l`.
pub fn wronskian_partial(fs: &[RationalPoly], i: usize, l: usize) -> Result<RationalPoly, WronskianError> {
    if fs.is_empty() {
        return Err(WronskianError::Empty);
    }
    if i == 0 || i > fs.len() {
        return Err(WronskianError::IndexOutOfRange { index: i, len: fs.len() });
    }
    let mut gs = fs.to_vec();
    gs[i - 1] = RationalPoly::monomial(num_traits::One::one(), l);
    wronskian(&gs)
}

/// Real finite critical points of `f2 / f1` for a coprime pair.
pub fn critical_points(f1: &RationalPoly, f2: &RationalPoly) -> Result<RootList, WronskianError> {
    let g = f1.gcd(f2);
    if g.degree() != Some(0) {
        return Err(WronskianError::NotCoprime(g.to_string()));
    }
    let w = wronskian(&[f1.clone(), f2.clone()])?;
    if w.is_zero() {
        // f2/f1 constant: no isolated critical points
        return Ok(RootList::default());
    }
    Ok(real_roots(&w, &RealInterval::all()).expect("nonzero Wronskian"))
}
