//! The cells `b(k)`, root coordinates, the Jacobi matrix and the operators `F^i`.

use super::DegreeLabError;
use crate::linalg::QMatrix;
use crate::polynomials::{real_roots, wronskian, wronskian_partial, RealInterval, RealRoot, RationalPoly};
use crate::rational::{int, pow2, round_significant, sign, to_f64, Rational};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Lowest-degree pattern `k_1 < ... < k_p` with `k_i <= m + i - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiIndexK {
    m: usize,
    k: Vec<usize>,
}

impl MultiIndexK {
    pub fn new(m: usize, k: Vec<usize>) -> Result<Self, DegreeLabError> {
        if m == 0 || k.is_empty() {
            return Err(DegreeLabError::InvalidIndex("m and p must be positive".into()));
        }
        for (i, &ki) in k.iter().enumerate() {
            if ki > m + i {
                return Err(DegreeLabError::InvalidIndex(format!("k_{} = {ki} exceeds m + {i}", i + 1)));
            }
            if i > 0 && ki <= k[i - 1] {
                return Err(DegreeLabError::InvalidIndex(format!("{k:?} is not strictly increasing")));
            }
        }
        Ok(MultiIndexK { m, k })
    }

    /// `(0, 1, ..., p-1)`: the open cell of the Grassmannian.
    pub fn zero(m: usize, p: usize) -> Self {
        MultiIndexK { m, k: (0..p).collect() }
    }

    /// `(m-1, m+1, m+2, ..., m+p-1)`.
    pub fn base(m: usize, p: usize) -> Self {
        let mut k = vec![m - 1];
        k.extend((1..p).map(|i| m + i));
        MultiIndexK { m, k }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.k.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.k
    }

    /// `k = sum (k_i - i + 1)`, the multiplicity of the Wronskian root at 0.
    pub fn defect(&self) -> usize {
        self.k.iter().enumerate().map(|(i, &ki)| ki - i).sum()
    }

    /// Number of coefficients, `mp - k`.
    pub fn dim(&self) -> usize {
        self.m * self.p() - self.defect()
    }

    /// Coefficient positions `(i, l)` in the fixed order: rows ascending,
    /// then second subscript ascending. `i` is 1-based.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let m = self.m;
        self.k
            .iter()
            .enumerate()
            .flat_map(|(i, &ki)| (ki..m + i).map(move |l| (i + 1, l)))
            .collect()
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.m + i - 1 - self.k[i - 1]
    }

    /// Whether `F^i` may be applied (1-based `i`).
    pub fn kcond(&self, i: usize) -> bool {
        if i == 0 || i > self.p() {
            return false;
        }
        if i == 1 {
            self.k[0] > 0
        } else {
            self.k[i - 1] > self.k[i - 2] + 1
        }
    }

    /// `k - e_i`.
    pub fn lowered(&self, i: usize) -> Result<Self, DegreeLabError> {
        if !self.kcond(i) {
            return Err(DegreeLabError::KCond { i, k: self.k.clone() });
        }
        let mut k = self.k.clone();
        k[i - 1] -= 1;
        Ok(MultiIndexK { m: self.m, k })
    }

    /// `prod_{j > l} (k_j - k_l)`.
    pub fn vandermonde(&self) -> Rational {
        let mut v = Rational::one();
        for a in 0..self.k.len() {
            for b in a + 1..self.k.len() {
                v *= int((self.k[b] - self.k[a]) as i64);
            }
        }
        v
    }
}

/// Number of coefficients in rows `1..i-1`.
pub fn chi(k: &MultiIndexK, i: usize) -> usize {
    (1..i).map(|l| k.row_len(l)).sum()
}

/// A vector `q = (q_1, ..., q_p)` with `q_i` monic of degree `m+i-1` and
/// lowest term `a_{i,k_i} z^{k_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BKVector {
    k: MultiIndexK,
    /// `rows[i][t] = a_{i+1, k_{i+1} + t}`
    rows: Vec<Vec<Rational>>,
}

impl BKVector {
    /// Builds from coefficients listed in `k.cells()` order.
    pub fn from_coeffs(k: MultiIndexK, coeffs: &[Rational]) -> Result<Self, DegreeLabError> {
        if coeffs.len() != k.dim() {
            return Err(DegreeLabError::InvalidIndex(format!(
                "expected {} coefficients, got {}",
                k.dim(),
                coeffs.len()
            )));
        }
        let mut rows = Vec::with_capacity(k.p());
        let mut it = coeffs.iter().cloned();
        for i in 1..=k.p() {
            rows.push(it.by_ref().take(k.row_len(i)).collect());
        }
        Ok(BKVector { k, rows })
    }

    /// Reads the pattern off the polynomials without any positivity or root
    /// checks.
    pub fn from_polys(m: usize, qs: &[RationalPoly]) -> Result<Self, DegreeLabError> {
        let mut ks = Vec::with_capacity(qs.len());
        let mut rows = Vec::with_capacity(qs.len());
        for (idx, q) in qs.iter().enumerate() {
            let deg = m + idx;
            if q.degree() != Some(deg) {
                return Err(DegreeLabError::WrongDegree { i: idx + 1, expected: deg, got: q.degree() });
            }
            if !q.leading().is_some_and(One::is_one) {
                return Err(DegreeLabError::NotMonic { i: idx + 1 });
            }
            let ki = q.order_at_zero().expect("nonzero");
            ks.push(ki);
            rows.push((ki..deg).map(|l| q.coeff(l)).collect());
        }
        Ok(BKVector { k: MultiIndexK::new(m, ks)?, rows })
    }

    /// Base cell vector `(z^m + a z^{m-1}, z^{m+1}, ..., z^{m+p-1})`.
    pub fn base(m: usize, p: usize, a: Rational) -> Self {
        let mut rows = vec![vec![a]];
        rows.extend((1..p).map(|_| Vec::new()));
        BKVector { k: MultiIndexK::base(m, p), rows }
    }

    pub fn k(&self) -> &MultiIndexK {
        &self.k
    }

    pub fn m(&self) -> usize {
        self.k.m
    }

    pub fn p(&self) -> usize {
        self.k.p()
    }

    pub fn coeffs(&self) -> Vec<Rational> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn with_coeffs(&self, coeffs: &[Rational]) -> Self {
        BKVector::from_coeffs(self.k.clone(), coeffs).expect("same pattern")
    }

    /// `a_{i,l}` (1-based `i`); `1` for the leading term, `0` outside the row.
    pub fn get(&self, i: usize, l: usize) -> Rational {
        let ki = self.k.k[i - 1];
        let top = self.k.m + i - 1;
        if l == top {
            Rational::one()
        } else if l >= ki && l < top {
            self.rows[i - 1][l - ki].clone()
        } else {
            Rational::zero()
        }
    }

    pub fn polys(&self) -> Vec<RationalPoly> {
        let m = self.k.m;
        (0..self.p())
            .map(|i| {
                let mut c = vec![Rational::zero(); m + i + 1];
                c[m + i] = Rational::one();
                for (t, a) in self.rows[i].iter().enumerate() {
                    c[self.k.k[i] + t] = a.clone();
                }
                RationalPoly::from_coeffs(c)
            })
            .collect()
    }

    pub fn wronskian(&self) -> RationalPoly {
        wronskian(&self.polys()).expect("p >= 1")
    }

    /// `c = prod_{j>l} (k_j - k_l) prod_j a_{j,k_j}`, the lowest Wronskian
    /// coefficient.
    pub fn lowest_coefficient(&self) -> Rational {
        let mut c = self.k.vandermonde();
        for i in 1..=self.p() {
            c *= self.get(i, self.k.k[i - 1]);
        }
        c
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// Checks membership in `b(k)` exactly and returns the pattern.
pub fn validate_bk(m: usize, qs: &[RationalPoly]) -> Result<BKVector, DegreeLabError> {
    let q = BKVector::from_polys(m, qs)?;
    check_bk(&q)?;
    Ok(q)
}

pub(crate) fn check_bk(q: &BKVector) -> Result<(), DegreeLabError> {
    for (i, l) in q.k.cells() {
        if !q.get(i, l).is_positive() {
            return Err(DegreeLabError::NonPositiveCoefficient { i, l });
        }
    }
    let w = q.wronskian();
    let deg = w.degree().expect("Wronskian of independent polynomials");
    let roots = real_roots(&w, &RealInterval::all()).expect("nonzero");
    if roots.total_multiplicity() != deg {
        return Err(DegreeLabError::RootOutside("the Wronskian has non-real roots".into()));
    }
    let window = RealInterval::left_open(int(-1), int(0));
    let inside = real_roots(&w, &window).expect("nonzero");
    if inside.total_multiplicity() != deg {
        return Err(DegreeLabError::RootOutside(format!("a root of {w} lies outside (-1, 0]")));
    }
    for r in inside.iter() {
        let at_zero = r.is_exact() && r.lo().is_zero();
        if at_zero {
            if r.multiplicity() != q.k.defect() {
                return Err(DegreeLabError::MultipleRoot(format!(
                    "root 0 has multiplicity {}, expected {}",
                    r.multiplicity(),
                    q.k.defect()
                )));
            }
        } else if r.multiplicity() > 1 {
            return Err(DegreeLabError::MultipleRoot(format!("root near {} has multiplicity {}", r.to_f64(), r.multiplicity())));
        }
    }
    Ok(())
}

fn refine_relative(r: &mut RealRoot, bits: u64) {
    let floor = pow2(-(4 * bits as i64));
    loop {
        let tol = (r.midpoint().abs() * pow2(-(bits as i64))).max(floor.clone());
        if r.is_exact() || r.width() <= tol {
            return;
        }
        r.refine_to(&(r.width() / int(2)));
    }
}

/// Isolated negative roots of the Wronskian, ordered from closest to zero.
fn negative_roots(q: &BKVector) -> Vec<RealRoot> {
    let w = q.wronskian();
    let mut roots: Vec<RealRoot> =
        real_roots(&w, &RealInterval::open(int(-1), int(0))).expect("nonzero").into_iter().collect();
    roots.reverse();
    roots
}

/// `x_1 < ... < x_{mp-k}` where `-x_j` are the negative Wronskian roots,
/// each to `bits` relative bits.
pub fn wronskian_roots_coords(q: &BKVector, bits: u64) -> Result<Vec<Rational>, DegreeLabError> {
    check_bk(q)?;
    Ok(negative_roots(q)
        .into_iter()
        .map(|mut r| {
            refine_relative(&mut r, bits);
            -r.midpoint()
        })
        .collect())
}

/// Jacobian of the coefficients-to-root-coordinates map with its certified
/// determinant sign.
#[derive(Debug, Clone)]
pub struct JacobiDelta {
    /// Entries rounded at the precision that certified the sign.
    pub matrix: QMatrix,
    pub det_sign: i32,
    pub bits: u64,
}

impl JacobiDelta {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.matrix.to_rows().iter().map(|r| r.iter().map(to_f64).collect()).collect()
    }

    pub fn det_f64(&self) -> f64 {
        to_f64(&self.matrix.det())
    }
}

/// `d x_i / d a_j = [dW/da_j](-x_i) / W'(-x_i)`, from `W(-x_i(a); a) = 0`.
pub fn jacobi_delta(q: &BKVector) -> Result<JacobiDelta, DegreeLabError> {
    check_bk(q)?;
    let polys = q.polys();
    let w = q.wronskian();
    let dw = w.derivative();
    let partials: Vec<RationalPoly> =
        q.k.cells().iter().map(|&(i, l)| wronskian_partial(&polys, i, l).expect("index in range")).collect();
    let roots = negative_roots(q);
    let n = q.k.dim();
    debug_assert_eq!(roots.len(), n);
    let mut last: Option<(i32, JacobiDelta)> = None;
    for bits in [64u64, 128, 256, 512, 1024] {
        let xs: Vec<Rational> = roots
            .iter()
            .map(|r| {
                let mut r = r.clone();
                refine_relative(&mut r, bits);
                r.midpoint()
            })
            .collect();
        let matrix = QMatrix::from_fn(n, n, |i, j| {
            let v = partials[j].eval(&xs[i]) / dw.eval(&xs[i]);
            round_significant(&v, bits)
        });
        let s = sign(&matrix.det());
        if let Some((prev, _)) = &last {
            if *prev == s && s != 0 {
                return Ok(JacobiDelta { matrix, det_sign: s, bits });
            }
        }
        last = Some((s, JacobiDelta { matrix, det_sign: s, bits }));
    }
    Err(DegreeLabError::SingularJacobian("determinant sign did not stabilize".into()))
}

/// Jacobian entries accurate to about `rel_bits` relative bits each. Roots
/// are refined until two successive precisions agree entrywise.
pub fn jacobian_entries(q: &BKVector, rel_bits: u64) -> Result<QMatrix, DegreeLabError> {
    check_bk(q)?;
    let polys = q.polys();
    let dw = q.wronskian().derivative();
    let partials: Vec<RationalPoly> =
        q.k.cells().iter().map(|&(i, l)| wronskian_partial(&polys, i, l).expect("index in range")).collect();
    let roots = negative_roots(q);
    let n = q.k.dim();
    let tol = pow2(-(rel_bits as i64));
    let mut prev: Option<QMatrix> = None;
    let mut bits = rel_bits.max(64);
    while bits <= 1 << 16 {
        let xs: Vec<Rational> = roots
            .iter()
            .map(|r| {
                let mut r = r.clone();
                refine_relative(&mut r, bits);
                r.midpoint()
            })
            .collect();
        let matrix = QMatrix::from_fn(n, n, |i, j| partials[j].eval(&xs[i]) / dw.eval(&xs[i]));
        if let Some(p) = &prev {
            let stable = (0..n).all(|i| {
                (0..n).all(|j| {
                    let (a, b) = (&matrix[(i, j)], &p[(i, j)]);
                    (a - b).abs() <= a.abs() * &tol
                })
            });
            if stable {
                return Ok(matrix);
            }
        }
        prev = Some(matrix);
        bits *= 2;
    }
    Err(DegreeLabError::SingularJacobian("entries did not stabilize".into()))
}

/// `F^i_a`: adds `a z^{k_i - 1}` to `q_i` and validates the result.
pub fn apply_f(q: &BKVector, i: usize, a: &Rational) -> Result<BKVector, DegreeLabError> {
    let out = apply_f_unchecked(q, i, a)?;
    check_bk(&out).map_err(|e| DegreeLabError::TooLarge { i, a: a.to_string(), reason: e.to_string() })?;
    Ok(out)
}

pub(crate) fn apply_f_unchecked(q: &BKVector, i: usize, a: &Rational) -> Result<BKVector, DegreeLabError> {
    if !a.is_positive() {
        return Err(DegreeLabError::TooLarge { i, a: a.to_string(), reason: "parameter must be positive".into() });
    }
    let k = q.k.lowered(i)?;
    let mut rows = q.rows.clone();
    rows[i - 1].insert(0, a.clone());
    Ok(BKVector { k, rows })
}

/// `c^* / a`: the lowest coefficient after `F^i`, per unit of the parameter.
pub fn lowest_coefficient_rate(q: &BKVector, i: usize) -> Result<Rational, DegreeLabError> {
    let ks = q.k.lowered(i)?;
    let mut c = ks.vandermonde();
    for j in 1..=q.p() {
        if j != i {
            c *= q.get(j, q.k.k[j - 1]);
        }
    }
    Ok(c)
}

/// `c_k = prod (k*_j - k*_l) / prod (k_j - k_l)`: the new root behaves like
/// `c_k a / a_{i,k_i}` as `a -> 0`.
pub fn new_root_constant(k: &MultiIndexK, i: usize) -> Result<Rational, DegreeLabError> {
    Ok(k.lowered(i)?.vandermonde() / k.vandermonde())
}

/// Parameter `a` for which `F^i_a` places its new root near `-x`.
pub fn predicted_parameter(q: &BKVector, i: usize, x: &Rational) -> Result<Rational, DegreeLabError> {
    Ok(x * q.lowest_coefficient() / lowest_coefficient_rate(q, i)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn poly(c: &[Rational]) -> RationalPoly {
        RationalPoly::from_coeffs(c.to_vec())
    }

    #[test]
    fn example_from_quarter() {
        // (z^2 + z/4, z^3): W = z^3 (z + 1/2), k = (1, 3)
        let q = validate_bk(2, &[poly(&[int(0), frac(1, 4), int(1)]), RationalPoly::monomial(int(1), 3)]).unwrap();
        assert_eq!(q.k().values(), &[1, 3]);
        assert_eq!(q.k().defect(), 3);
        assert_eq!(wronskian_roots_coords(&q, 64).unwrap(), vec![frac(1, 2)]);
        let rejected = validate_bk(2, &[poly(&[int(0), int(1), int(1)]), RationalPoly::monomial(int(1), 3)]);
        assert!(matches!(rejected, Err(DegreeLabError::RootOutside(_))));
    }

    #[test]
    fn base_cell_root_and_det() {
        for m in 2..=3usize {
            for p in 2..=4usize {
                let a = frac(1, 3 * p as i64);
                let q = BKVector::base(m, p, a.clone());
                check_bk(&q).unwrap();
                let x = wronskian_roots_coords(&q, 80).unwrap();
                assert_eq!(x, vec![int(p as i64) * &a]);
                assert_eq!(jacobi_delta(&q).unwrap().matrix.det(), int(p as i64));
            }
        }
    }

    #[test]
    fn base_cell_wronskian_closed_form() {
        // W = 1!2!...(p-1)! z^{mp-1} (z + p a); the leading factor is the
        // generalized Vandermonde of the degrees m, ..., m+p-1
        for m in 2..=4usize {
            for p in 2..=5usize {
                let a = frac(2, 7);
                let sf: i64 = (1..p as i64).map(|j| (1..=j).product::<i64>()).product();
                let expected = RationalPoly::from_coeffs(vec![int(p as i64) * &a, int(1)])
                    .shift_up(m * p - 1)
                    .scale(&int(sf));
                assert_eq!(BKVector::base(m, p, a).wronskian(), expected);
            }
        }
    }

    #[test]
    fn chi_examples() {
        let k = MultiIndexK::base(3, 3);
        assert_eq!(chi(&k, 1), 0);
        assert_eq!(chi(&k, 2), 1);
        let z = MultiIndexK::zero(3, 3);
        assert_eq!(chi(&z, 3), 6);
    }

    #[test]
    fn cells_follow_rows() {
        let k = MultiIndexK::new(2, vec![0, 2]).unwrap();
        assert_eq!(k.cells(), vec![(1, 0), (1, 1), (2, 2)]);
        assert_eq!(k.dim(), 3);
        assert!(k.kcond(2));
        assert!(!k.kcond(1));
    }

    #[test]
    fn lowest_coefficient_matches_wronskian() {
        let q = BKVector::base(2, 2, frac(1, 8));
        let q = apply_f(&q, 1, &frac(1, 200)).unwrap();
        let w = q.wronskian();
        let k = q.k().defect();
        assert_eq!(w.order_at_zero(), Some(k));
        assert_eq!(w.coeff(k), q.lowest_coefficient());
    }

    #[test]
    fn kcond_violation() {
        let q = BKVector::base(2, 3, frac(1, 8));
        assert!(matches!(apply_f(&q, 3, &frac(1, 100)), Err(DegreeLabError::KCond { .. })));
        assert!(apply_f(&q, 2, &frac(1, 1000)).is_ok());
        assert!(matches!(apply_f(&q, 1, &int(5)), Err(DegreeLabError::TooLarge { .. })));
    }
}
