//! Newton iteration for `monic W(f_K) = w` in big-cell coordinates.
//!
//! Unknowns are the entries of `K` in [`BigCellPoint::flatten`] order; the
//! equations are the `mp` lower coefficients of the monic Wronskian.

use crate::grassmann::{big_cell_leading, big_cell_polys, BigCellPoint};
use crate::linalg::QMatrix;
use crate::polynomials::{wronskian, wronskian_partial, RationalPoly};
use crate::rational::{from_f64, pow2, round_significant, sign, to_f64, Rational};
use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};

type Poly = Vec<f64>;

fn pmul(a: &[f64], b: &[f64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pderiv(a: &[f64]) -> Poly {
    a.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (p, if inv % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect()
}

/// Double-precision Wronskian by Leibniz expansion; fine for small `p`.
pub(crate) struct WronskiF64 {
    m: usize,
    p: usize,
    perms: Vec<(Vec<usize>, f64)>,
    lead: f64,
}

impl WronskiF64 {
    pub(crate) fn new(m: usize, p: usize) -> Self {
        WronskiF64 { m, p, perms: permutations(p), lead: to_f64(&big_cell_leading(m, p)) }
    }

    fn polys(&self, x: &[f64]) -> Vec<Poly> {
        let (m, p) = (self.m, self.p);
        (0..p)
            .map(|j| {
                let mut c = vec![0.0; m + p - j];
                c[m + p - j - 1] = 1.0;
                for i in 0..m {
                    c[m - 1 - i] = -x[j * m + i];
                }
                c
            })
            .collect()
    }

    fn wronskian(&self, fs: &[Poly]) -> Poly {
        let p = self.p;
        let mut ders: Vec<Vec<Poly>> = vec![fs.to_vec()];
        for r in 1..p {
            ders.push(ders[r - 1].iter().map(|f| pderiv(f)).collect());
        }
        let mut out = vec![0.0; self.m * p + 1];
        for (perm, s) in &self.perms {
            let mut term = vec![*s];
            for (r, &col) in perm.iter().enumerate() {
                term = pmul(&term, &ders[r][col]);
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        out
    }

    /// Monic coefficients `0..mp` of the Wronskian minus the target.
    pub(crate) fn residual(&self, x: &[f64], target: &[f64]) -> DVector<f64> {
        let w = self.wronskian(&self.polys(x));
        DVector::from_iterator(self.m * self.p, (0..self.m * self.p).map(|t| w[t] / self.lead - target[t]))
    }

    pub(crate) fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (m, p) = (self.m, self.p);
        let fs = self.polys(x);
        let n = m * p;
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..p {
            for i in 0..m {
                let mut gs = fs.clone();
                let mut mono = vec![0.0; m - i];
                mono[m - 1 - i] = -1.0;
                gs[j] = mono;
                let d = self.wronskian(&gs);
                for t in 0..n {
                    jac[(t, j * m + i)] = d[t] / self.lead;
                }
            }
        }
        jac
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub step_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iter: 200, step_tol: 1e-12 }
    }
}

/// Damped Newton from `start`; `None` if it does not converge.
pub(crate) fn newton_f64(sys: &WronskiF64, target: &[f64], start: &[f64], opts: &NewtonOptions) -> Option<Vec<f64>> {
    let mut x = DVector::from_column_slice(start);
    let mut r = sys.residual(x.as_slice(), target);
    let scale = 1.0 + target.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for _ in 0..opts.max_iter {
        let jac = sys.jacobian(x.as_slice());
        let step = jac.lu().solve(&r)?;
        if !step.iter().all(|v| v.is_finite()) {
            return None;
        }
        let norm0 = r.norm();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = &x - &step * lambda;
            let rc = sys.residual(cand.as_slice(), target);
            if rc.norm() < norm0 || rc.norm() <= 1e-14 * scale {
                accepted = Some((cand, rc));
                break;
            }
            lambda *= 0.5;
        }
        let (cand, rc) = accepted?;
        let moved = (&cand - &x).amax();
        x = cand;
        r = rc;
        if moved < opts.step_tol * (1.0 + x.amax()) {
            return (r.norm() <= 1e-8 * scale).then(|| x.iter().copied().collect());
        }
        if x.amax() > 1e8 {
            return None;
        }
    }
    None
}

/// Exact Jacobian of `K -> monic W(f_K)` (lower `mp` coefficients).
pub fn coefficient_jacobian(b: &BigCellPoint) -> QMatrix {
    let (m, p) = (b.m, b.p);
    let n = m * p;
    let fs = big_cell_polys(b);
    let lead = big_cell_leading(m, p);
    let mut jac = QMatrix::zeros(n, n);
    for j in 0..p {
        for i in 0..m {
            // d f_j / d k_{ij} = -z^{m-1-i}
            let d = -&wronskian_partial(&fs, j + 1, m - 1 - i).expect("valid index");
            for t in 0..n {
                jac[(t, j * m + i)] = d.coeff(t) / &lead;
            }
        }
    }
    jac
}

fn residual_exact(b: &BigCellPoint, w_monic: &RationalPoly) -> Vec<Rational> {
    let n = b.m * b.p;
    let w = wronskian(&big_cell_polys(b)).expect("p >= 1");
    let lead = big_cell_leading(b.m, b.p);
    (0..n).map(|t| w.coeff(t) / &lead - w_monic.coeff(t)).collect()
}

/// A solution refined in rational arithmetic.
#[derive(Debug, Clone)]
pub struct Polished {
    pub point: BigCellPoint,
    pub residual: f64,
    pub sign: i32,
}

/// Newton in rationals rounded to `bits` significant bits. Returns the
/// refined point with the sign of the exact Jacobian determinant there, or
/// `None` if the iteration does not settle or the Jacobian is singular.
pub fn polish(start: &BigCellPoint, w_monic: &RationalPoly, bits: u64) -> Option<Polished> {
    let (m, p) = (start.m, start.p);
    let mut x = start.flatten();
    let tol = pow2(-(bits as i64) + 32);
    for _ in 0..60 {
        let b = BigCellPoint::from_flat(m, p, &x);
        let jac = coefficient_jacobian(&b);
        let f = residual_exact(&b, w_monic);
        let step = jac.solve(&f)?;
        let scale = x.iter().fold(Rational::zero(), |a, v| a.max(v.abs())).max(pow2(-64));
        let done = step.iter().all(|d| d.abs() <= &scale * &tol);
        x = x.iter().zip(&step).map(|(v, d)| round_significant(&(v - d), bits)).collect();
        if done {
            let point = BigCellPoint::from_flat(m, p, &x);
            let s = sign(&coefficient_jacobian(&point).det());
            if s == 0 {
                return None;
            }
            let res = residual_exact(&point, w_monic).iter().map(|r| to_f64(&r.abs())).fold(0.0, f64::max);
            return Some(Polished { point, residual: res, sign: s });
        }
    }
    None
}

pub(crate) fn flat_to_point(m: usize, p: usize, x: &[f64]) -> BigCellPoint {
    BigCellPoint::from_flat(m, p, &x.iter().map(|&v| from_f64(v)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn leibniz_matches_exact() {
        let b = BigCellPoint::from_flat(3, 2, &[int(1), frac(-1, 2), int(2), frac(3, 4), int(0), int(-1)]);
        let sys = WronskiF64::new(3, 2);
        let exact = wronskian(&big_cell_polys(&b)).unwrap();
        let x: Vec<f64> = b.flatten().iter().map(to_f64).collect();
        let w = sys.wronskian(&sys.polys(&x));
        for (t, v) in w.iter().enumerate() {
            assert!((v - to_f64(&exact.coeff(t))).abs() < 1e-12);
        }
        let jac = sys.jacobian(&x);
        let ej = coefficient_jacobian(&b);
        for r in 0..6 {
            for c in 0..6 {
                assert!((jac[(r, c)] - to_f64(&ej[(r, c)])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn planted_solution_is_recovered() {
        let b = BigCellPoint::from_flat(2, 2, &[frac(1, 3), int(-1), int(2), frac(1, 5)]);
        let w = wronskian(&big_cell_polys(&b)).unwrap().monic();
        let sys = WronskiF64::new(2, 2);
        let target: Vec<f64> = w.to_f64_coeffs();
        let start: Vec<f64> = b.flatten().iter().map(|v| to_f64(v) + 0.05).collect();
        let x = newton_f64(&sys, &target, &start, &NewtonOptions::default()).unwrap();
        let pol = polish(&flat_to_point(2, 2, &x), &w, 256).unwrap();
        for (a, e) in pol.point.flatten().iter().zip(b.flatten()) {
            assert!((a - e).abs() < pow2(-200));
        }
        assert!(pol.residual < 1e-60);
    }
}
