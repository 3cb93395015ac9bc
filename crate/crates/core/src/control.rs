//! Static output feedback: pole placement maps, coprime factorizations and
//! the extended map on the Grassmannian.

use crate::grassmann::{column_subsets, coordinate_subspace, osculating_e_poly, plucker, MatrixK};
use crate::linalg::QMatrix;
use crate::polynomials::{PolyMatrix, RationalPoly};
use crate::rational::{int, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("degenerate: the determinant vanishes identically for {0}")]
    Degenerate(String),
    #[error("cannot realize: {0}")]
    NotRealizable(String),
}

/// `x' = Ax + Bu, y = Cx` with `A: n x n`, `B: n x m`, `C: p x n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemJson", into = "SystemJson")]
pub struct LinearSystem {
    a: QMatrix,
    b: QMatrix,
    c: QMatrix,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    #[serde(rename = "A")]
    a: QMatrix,
    #[serde(rename = "B")]
    b: QMatrix,
    #[serde(rename = "C")]
    c: QMatrix,
}

impl TryFrom<SystemJson> for LinearSystem {
    type Error = ControlError;
    fn try_from(j: SystemJson) -> Result<Self, ControlError> {
        LinearSystem::new(j.a, j.b, j.c)
    }
}

impl From<LinearSystem> for SystemJson {
    fn from(s: LinearSystem) -> Self {
        SystemJson { a: s.a, b: s.b, c: s.c }
    }
}

impl LinearSystem {
    pub fn new(a: QMatrix, b: QMatrix, c: QMatrix) -> Result<Self, ControlError> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || c.ncols() != n {
            return Err(ControlError::Dimension(format!(
                "A is {}x{}, B is {}x{}, C is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        Ok(LinearSystem { a, b, c })
    }

    pub fn a(&self) -> &QMatrix {
        &self.a
    }

    pub fn b(&self) -> &QMatrix {
        &self.b
    }

    pub fn c(&self) -> &QMatrix {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }
}

/// Gain `K: m x p` for the feedback `u = Ky`; JSON is the bare matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GainMatrix {
    pub k: QMatrix,
}

impl GainMatrix {
    pub fn new(k: QMatrix) -> Self {
        GainMatrix { k }
    }

    /// `[K, I]`, a point of the big cell.
    pub fn extended(&self) -> MatrixK {
        let (m, p) = (self.k.nrows(), self.k.ncols());
        let entries = QMatrix::from_fn(m, m + p, |i, j| {
            if j < p {
                self.k[(i, j)].clone()
            } else if j - p == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        MatrixK::new(m, p, entries).expect("identity block has full rank")
    }
}

/// Left factorization `C (zI - A)^{-1} B = D(z)^{-1} N(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeFactors {
    d: PolyMatrix,
    n: PolyMatrix,
    projection_only: bool,
}

#[derive(Serialize, Deserialize)]
struct FactorsJson {
    #[serde(rename = "D")]
    d: Vec<Vec<RationalPoly>>,
    #[serde(rename = "N")]
    n: Vec<Vec<RationalPoly>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    projection_only: bool,
}

impl Serialize for CoprimeFactors {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FactorsJson { d: self.d.rows().to_vec(), n: self.n.rows().to_vec(), projection_only: self.projection_only }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoprimeFactors {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = FactorsJson::deserialize(d)?;
        let (dm, nm) = (PolyMatrix::from_rows(j.d), PolyMatrix::from_rows(j.n));
        if j.projection_only {
            CoprimeFactors::projection_only(dm, nm)
        } else {
            CoprimeFactors::new(dm, nm)
        }
        .map_err(serde::de::Error::custom)
    }
}

fn shape_check(d: &PolyMatrix, n: &PolyMatrix) -> Result<(), ControlError> {
    let p = d.nrows();
    if p == 0 || d.ncols() != p || n.nrows() != p || n.ncols() == 0 {
        return Err(ControlError::Dimension(format!(
            "D is {}x{}, N is {}x{}",
            d.nrows(),
            d.ncols(),
            n.nrows(),
            n.ncols()
        )));
    }
    Ok(())
}

impl CoprimeFactors {
    /// Checks that the maximal minors of `[D, N]` have no common zero and
    /// that `det D` strictly dominates the other minors in degree.
    pub fn new(d: PolyMatrix, n: PolyMatrix) -> Result<Self, ControlError> {
        shape_check(&d, &n)?;
        let f = CoprimeFactors { d, n, projection_only: false };
        let minors = f.maximal_minors();
        let det_d = &minors[0].1;
        let deg = det_d.degree().ok_or_else(|| ControlError::InvalidFactorization("det D is zero".into()))?;
        for (cols, mnr) in &minors[1..] {
            if mnr.degree().is_some_and(|e| e >= deg) {
                return Err(ControlError::InvalidFactorization(format!(
                    "minor on columns {cols:?} has degree {} >= deg det D = {deg}",
                    mnr.degree().unwrap()
                )));
            }
        }
        let g = minors.iter().fold(RationalPoly::zero(), |g, (_, mnr)| g.gcd(mnr));
        if g.degree() != Some(0) {
            return Err(ControlError::InvalidFactorization(format!("maximal minors share the factor {g}")));
        }
        Ok(f)
    }

    /// Skips validation; such factors only define a projection of the
    /// Grassmannian and need not come from a system.
    pub fn projection_only(d: PolyMatrix, n: PolyMatrix) -> Result<Self, ControlError> {
        shape_check(&d, &n)?;
        Ok(CoprimeFactors { d, n, projection_only: true })
    }

    pub fn d(&self) -> &PolyMatrix {
        &self.d
    }

    pub fn n(&self) -> &PolyMatrix {
        &self.n
    }

    pub fn is_projection_only(&self) -> bool {
        self.projection_only
    }

    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.n.ncols()
    }

    /// `[D(z), N(z)]`.
    pub fn stacked(&self) -> PolyMatrix {
        self.d.augment(&self.n)
    }

    /// Maximal minors of `[D, N]`, `det D` first, then the other column
    /// sets in colexicographic order.
    pub fn maximal_minors(&self) -> Vec<(Vec<usize>, RationalPoly)> {
        let s = self.stacked();
        let p = self.outputs();
        let out: Vec<(Vec<usize>, RationalPoly)> = column_subsets(s.ncols(), p)
            .into_iter()
            .map(|cols| {
                let mnr = s.select_cols(&cols).det();
                (cols, mnr)
            })
            .collect();
        // the subset {0..p-1} is first in colex order
        debug_assert_eq!(out[0].0, (0..p).collect::<Vec<_>>());
        out
    }
}

fn constant_poly_matrix(m: &QMatrix) -> PolyMatrix {
    PolyMatrix::constant(m)
}

/// `det(zI - A - BKC)`.
pub fn pole_poly_state(sys: &LinearSystem, k: &GainMatrix) -> Result<RationalPoly, ControlError> {
    if k.k.nrows() != sys.inputs() || k.k.ncols() != sys.outputs() {
        return Err(ControlError::Dimension(format!(
            "K is {}x{}, expected {}x{}",
            k.k.nrows(),
            k.k.ncols(),
            sys.inputs(),
            sys.outputs()
        )));
    }
    let closed = &sys.a + &(&(&sys.b * &k.k) * &sys.c);
    let n = sys.n();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = RationalPoly::constant(-closed[(i, j)].clone());
                    if i == j {
                        &c + &RationalPoly::z()
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    Ok(PolyMatrix::from_rows(rows).det())
}

/// `det(zI - A - BKC)` by the Faddeev-LeVerrier recursion on the closed-loop
/// matrix, without polynomial determinants.
pub fn pole_poly_leverrier(sys: &LinearSystem, k: &GainMatrix) -> Result<RationalPoly, ControlError> {
    if k.k.nrows() != sys.inputs() || k.k.ncols() != sys.outputs() {
        return Err(ControlError::Dimension(format!("K is {}x{}", k.k.nrows(), k.k.ncols())));
    }
    let a = &sys.a + &(&(&sys.b * &k.k) * &sys.c);
    let n = sys.n();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = QMatrix::zeros(n, n);
    for step in 1..=n {
        let shifted = &(&a * &mk) + &QMatrix::identity(n).scale(&coeffs[n - step + 1]);
        let am = &a * &shifted;
        let trace = (0..n).fold(Rational::zero(), |t, i| t + &am[(i, i)]);
        coeffs[n - step] = -trace / int(step as i64);
        mk = shifted;
    }
    Ok(RationalPoly::from_coeffs(coeffs))
}

/// `det(D(z) - N(z) K)`.
pub fn pole_poly_factored(f: &CoprimeFactors, k: &GainMatrix) -> Result<RationalPoly, ControlError> {
    if k.k.nrows() != f.inputs() || k.k.ncols() != f.outputs() {
        return Err(ControlError::Dimension(format!(
            "K is {}x{}, expected {}x{}",
            k.k.nrows(),
            k.k.ncols(),
            f.inputs(),
            f.outputs()
        )));
    }
    Ok(f.d.sub(&f.n.mul(&constant_poly_matrix(&k.k))).det())
}

/// `det [[D, N], [hatK]]`, defined up to scale.
pub fn extended_pole_map(f: &CoprimeFactors, hat_k: &MatrixK) -> Result<RationalPoly, ControlError> {
    if hat_k.m() != f.inputs() || hat_k.p() != f.outputs() {
        return Err(ControlError::Dimension(format!(
            "hatK is {}x{}, expected {}x{}",
            hat_k.m(),
            hat_k.m() + hat_k.p(),
            f.inputs(),
            f.inputs() + f.outputs()
        )));
    }
    let det = f.stacked().stack(&constant_poly_matrix(hat_k.entries())).det();
    if det.is_zero() {
        return Err(ControlError::Degenerate(format!("{:?}", hat_k.entries().to_rows())));
    }
    Ok(det)
}

/// The extended map as a linear form in Plücker coordinates: the polynomial
/// attached to each column subset `S` (colex order) is the value at the
/// coordinate subspace spanned by the unit rows `e_s, s in S`.
pub fn plucker_form(f: &CoprimeFactors) -> Vec<(Vec<usize>, RationalPoly)> {
    let (m, p) = (f.inputs(), f.outputs());
    column_subsets(m + p, m)
        .into_iter()
        .map(|s| {
            let e = coordinate_subspace(m, p, &s);
            let v = f.stacked().stack(&constant_poly_matrix(e.entries())).det();
            (s, v)
        })
        .collect()
}

/// `sum_S plucker_S(hatK) * form_S`.
pub fn evaluate_plucker_form(form: &[(Vec<usize>, RationalPoly)], hat_k: &MatrixK) -> RationalPoly {
    let pv = plucker(hat_k);
    form.iter()
        .zip(&pv.coordinates)
        .fold(RationalPoly::zero(), |acc, ((_, poly), c)| &acc + &poly.scale(c))
}

/// `[D, N] = E(z)`: the Wronski map as an extended pole placement map.
pub fn wronski_system(m: usize, p: usize) -> CoprimeFactors {
    let e = osculating_e_poly(m, p);
    let d = e.select_cols(&(0..p).collect::<Vec<_>>());
    let n = e.select_cols(&(p..m + p).collect::<Vec<_>>());
    CoprimeFactors::projection_only(d, n).expect("shapes match")
}

/// Observer-form realization of `D = I z^r - sum_{l<r} D_l z^l` with
/// `deg N < r`: state dimension `pr`, `C = [I 0 ... 0]`, block column
/// `A = [D_{r-1}; ...; D_0]` next to a shifted identity, `B = [N_{r-1}; ...; N_0]`.
pub fn realize(f: &CoprimeFactors) -> Result<LinearSystem, ControlError> {
    let (p, m) = (f.outputs(), f.inputs());
    let r = (0..p).filter_map(|i| f.d.get(i, i).degree()).max().unwrap_or(0);
    if r == 0 {
        return Err(ControlError::NotRealizable("D has no positive degree".into()));
    }
    for i in 0..p {
        for j in 0..p {
            let e = f.d.get(i, j);
            let lead = e.coeff(r);
            let expected = if i == j { Rational::one() } else { Rational::zero() };
            if lead != expected || e.degree().is_some_and(|dg| dg > r) {
                return Err(ControlError::NotRealizable("D must be I z^r plus lower terms".into()));
            }
        }
        for j in 0..m {
            if f.n.get(i, j).degree().is_some_and(|dg| dg >= r) {
                return Err(ControlError::NotRealizable("deg N must be below deg D".into()));
            }
        }
    }
    let n = p * r;
    let mut a = QMatrix::zeros(n, n);
    let mut b = QMatrix::zeros(n, m);
    let mut c = QMatrix::zeros(p, n);
    for blk in 0..r {
        let l = r - 1 - blk;
        for i in 0..p {
            for j in 0..p {
                a[(blk * p + i, j)] = -f.d.get(i, j).coeff(l);
            }
            if blk + 1 < r {
                a[(blk * p + i, (blk + 1) * p + i)] = Rational::one();
            }
            for j in 0..m {
                b[(blk * p + i, j)] = f.n.get(i, j).coeff(l);
            }
        }
    }
    for i in 0..p {
        c[(i, i)] = Rational::one();
    }
    LinearSystem::new(a, b, c)
}

/// Random factorization with `D = I z^m + ...` (so `n = mp`) and `deg N < m`,
/// integer coefficients in `[-3, 3]`; retries until it validates.
pub fn random_factorization(m: usize, p: usize, rng: &mut ChaCha8Rng) -> CoprimeFactors {
    loop {
        let d = PolyMatrix::from_rows(
            (0..p)
                .map(|i| {
                    (0..p)
                        .map(|j| {
                            let mut c: Vec<Rational> = (0..m).map(|_| int(rng.gen_range(-3..=3))).collect();
                            c.push(if i == j { Rational::one() } else { Rational::zero() });
                            RationalPoly::from_coeffs(c)
                        })
                        .collect()
                })
                .collect(),
        );
        let n = PolyMatrix::from_rows(
            (0..p)
                .map(|_| (0..m).map(|_| RationalPoly::from_coeffs((0..m).map(|_| int(rng.gen_range(-3..=3))).collect())).collect())
                .collect(),
        );
        if let Ok(f) = CoprimeFactors::new(d, n) {
            return f;
        }
    }
}

/// Random gain with entries in `{-2, -3/2, ..., 2}`.
pub fn random_gain(m: usize, p: usize, rng: &mut ChaCha8Rng) -> GainMatrix {
    GainMatrix::new(QMatrix::from_fn(m, p, |_, _| Rational::new(rng.gen_range(-4..=4).into(), 2.into())))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
