//! Walks from the base cell to `b(0, 1, ..., p-1)` driven by ballot sequences.

use super::bk::{apply_f, apply_f_unchecked, check_bk, chi, jacobi_delta, predicted_parameter, BKVector, MultiIndexK};
use super::DegreeLabError;
use crate::combinatorics::BallotSequence;
use crate::grassmann::BigCellPoint;
use crate::linalg::QMatrix;
use crate::polynomials::{wronskian_partial, RationalPoly};
use crate::rational::{frac, int, pow2, round_significant, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// The base cell Wronskian is `s z^{mp-1} (z + p a)` with `s > 0`, so its
/// root stays in `(-1, 0)` exactly for `a < 1/p`.
pub fn base_bound(p: usize) -> Rational {
    frac(1, p as i64)
}

/// Applies `F^{sigma_j}` with parameter `schedule[j]` for `j >= 2`, starting
/// from the base cell with `a_{1,m-1} = schedule[0]`.
pub fn seed_chain(sigma: &BallotSequence, schedule: &[Rational]) -> Result<BKVector, DegreeLabError> {
    let (m, p) = (sigma.m(), sigma.p());
    let n = m * p;
    if schedule.len() != n {
        return Err(DegreeLabError::Schedule(format!("expected {n} parameters, got {}", schedule.len())));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) || !schedule[n - 1].is_positive() {
        return Err(DegreeLabError::Schedule("parameters must be positive and strictly decreasing".into()));
    }
    if schedule[0] >= base_bound(p) {
        return Err(DegreeLabError::Schedule(format!("a_(1,{}) must be below 1/p", m - 1)));
    }
    let mut q = BKVector::base(m, p, schedule[0].clone());
    for (step, (&i, a)) in sigma.entries().iter().zip(schedule).enumerate().skip(1) {
        q = apply_f(&q, i as usize, a).map_err(|e| DegreeLabError::Walk { step: step + 1, reason: e.to_string() })?;
    }
    Ok(q)
}

/// `a_1 = 1/8`, `a_{j+1} = a_j^2 / 16`. Each new root is roughly the new
/// parameter over an earlier one, so a geometric schedule is not enough.
pub fn squaring_schedule(n: usize) -> Vec<Rational> {
    let mut out = vec![frac(1, 8)];
    while out.len() < n {
        let last = out.last().unwrap();
        out.push(last * last / int(16));
    }
    out.truncate(n);
    out
}

/// Result of [`seed_chain_adaptive`].
#[derive(Debug, Clone)]
pub struct AdaptiveChain {
    pub point: BKVector,
    pub schedule: Vec<Rational>,
    /// `sgn det` of the Jacobi matrix after each step, base cell first.
    pub signs: Vec<i32>,
}

/// Walk with parameters found by back-off: each step starts at a quarter of
/// the previous parameter and halves until the step validates and the sign
/// of the Jacobi determinant is unchanged under one further halving.
pub fn seed_chain_adaptive(sigma: &BallotSequence, first: &Rational) -> Result<AdaptiveChain, DegreeLabError> {
    let p = sigma.p();
    if !first.is_positive() || first >= &base_bound(p) {
        return Err(DegreeLabError::Schedule("base coefficient out of range".into()));
    }
    let mut q = BKVector::base(sigma.m(), p, first.clone());
    let mut schedule = vec![first.clone()];
    let mut signs = vec![jacobi_delta(&q)?.det_sign];
    for (step, &i) in sigma.entries().iter().enumerate().skip(1) {
        let i = i as usize;
        let mut a = schedule.last().unwrap() / int(4);
        let mut accepted = None;
        for _ in 0..200 {
            if let Ok(next) = apply_f(&q, i, &a) {
                let half = &a / int(2);
                if let Ok(next_half) = apply_f(&q, i, &half) {
                    let (s1, s2) = (jacobi_delta(&next)?.det_sign, jacobi_delta(&next_half)?.det_sign);
                    if s1 == s2 {
                        accepted = Some((next, s1));
                        break;
                    }
                }
            }
            a /= int(2);
        }
        let (next, s) =
            accepted.ok_or(DegreeLabError::Walk { step: step + 1, reason: "no admissible parameter found".into() })?;
        q = next;
        schedule.push(a);
        signs.push(s);
    }
    Ok(AdaptiveChain { point: q, schedule, signs })
}

/// Expected factor `(-1)^{chi(k, i)}` for each step of `sigma` after the
/// first.
pub fn sign_law_factors(sigma: &BallotSequence) -> Vec<i32> {
    let (m, p) = (sigma.m(), sigma.p());
    let mut k = MultiIndexK::base(m, p);
    let mut out = Vec::new();
    for &i in &sigma.entries()[1..] {
        let i = i as usize;
        out.push(if chi(&k, i) % 2 == 0 { 1 } else { -1 });
        k = k.lowered(i).expect("ballot sequences satisfy the step condition");
    }
    out
}

/// Reads `sigma` off the ordering of the coefficients: the `j`-th largest
/// coefficient sits in row `sigma_j`. `None` on ties or if the rows do not
/// form a ballot sequence.
pub fn recover_sigma(q: &BKVector) -> Option<BallotSequence> {
    let mut cells: Vec<(Rational, u8)> = Vec::new();
    for (i, row) in q.rows().iter().enumerate() {
        for a in row {
            cells.push((a.clone(), i as u8 + 1));
        }
    }
    cells.sort_by(|a, b| b.0.cmp(&a.0));
    if cells.windows(2).any(|w| w[0].0 == w[1].0) {
        return None;
    }
    BallotSequence::new(cells.into_iter().map(|c| c.1).collect(), q.m(), q.p()).ok()
}

/// Root spacing of a thorn target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThornSpacing {
    /// `x_j = delta^{n-j+1}`, so `x_j = delta x_{j+1}`.
    #[default]
    Geometric,
    /// `x_j = delta^{2^{n-j}}`, so `x_j = x_{j+1}^2`.
    Nested,
}

/// Roots `-x_j` with `x_1 < ... < x_n = delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThornTarget {
    pub delta: Rational,
    pub n: usize,
    pub spacing: ThornSpacing,
}

impl ThornTarget {
    pub fn new(delta: Rational, n: usize) -> Result<Self, DegreeLabError> {
        if !delta.is_positive() || delta >= Rational::one() || n == 0 {
            return Err(DegreeLabError::Schedule("thorn ratio must lie in (0, 1)".into()));
        }
        Ok(ThornTarget { delta, n, spacing: ThornSpacing::Geometric })
    }

    pub fn nested(delta: Rational, n: usize) -> Result<Self, DegreeLabError> {
        Ok(ThornTarget { spacing: ThornSpacing::Nested, ..Self::new(delta, n)? })
    }

    /// `x_1 < ... < x_n`.
    pub fn coords(&self) -> Vec<Rational> {
        match self.spacing {
            ThornSpacing::Geometric => (1..=self.n).map(|j| num_traits::pow(self.delta.clone(), self.n - j + 1)).collect(),
            ThornSpacing::Nested => {
                let mut xs = vec![self.delta.clone()];
                for _ in 1..self.n {
                    let x = xs.last().unwrap();
                    xs.push(x * x);
                }
                xs.reverse();
                xs
            }
        }
    }

    /// Monic `prod (z + x_j)`.
    pub fn polynomial(&self) -> RationalPoly {
        let roots: Vec<Rational> = self.coords().iter().map(|x| -x).collect();
        RationalPoly::from_roots(&roots)
    }
}

const WALK_BITS: u64 = 320;

/// Newton on all coefficients of `q` so that `W_q / z^k` has roots
/// `-x` for `x` in `xs` (with the fixed leading coefficient of `W_q`).
fn correct_stage(q: &BKVector, xs: &[Rational]) -> Option<BKVector> {
    let k = q.k().defect();
    let n = q.k().dim();
    debug_assert_eq!(xs.len(), n);
    let lead = q.wronskian().leading().cloned()?;
    let roots: Vec<Rational> = xs.iter().map(|x| -x).collect();
    let target = RationalPoly::from_roots(&roots).scale(&lead);
    let cells = q.k().cells();
    let mut cur = q.clone();
    let tol = pow2(-(WALK_BITS as i64) + 24);
    for _ in 0..80 {
        let polys = cur.polys();
        let w = cur.wronskian();
        let f: Vec<Rational> = (0..n).map(|t| w.coeff(k + t) - target.coeff(t)).collect();
        let partials: Vec<RationalPoly> =
            cells.iter().map(|&(i, l)| wronskian_partial(&polys, i, l).expect("valid index")).collect();
        let jac = QMatrix::from_fn(n, n, |t, c| partials[c].coeff(k + t));
        let step = jac.solve(&f)?;
        let a = cur.coeffs();
        let next: Vec<Rational> = a.iter().zip(&step).map(|(x, d)| round_significant(&(x - d), WALK_BITS)).collect();
        let done = a.iter().zip(&step).all(|(x, d)| d.abs() <= x.abs() * &tol);
        cur = cur.with_coeffs(&next);
        if done {
            return Some(cur);
        }
    }
    None
}

/// Follows `sigma` towards the thorn target: every `F^i` step is taken with
/// the parameter that puts the new root at the next thorn coordinate, and
/// all coefficients are then corrected so that the current roots are exactly
/// the largest thorn coordinates. Returns a high-precision approximation of
/// the preimage in `b(0, ..., p-1)`.
pub fn thorn_walk(sigma: &BallotSequence, target: &ThornTarget) -> Result<BKVector, DegreeLabError> {
    let (m, p) = (sigma.m(), sigma.p());
    let n = m * p;
    if target.n != n {
        return Err(DegreeLabError::Schedule(format!("thorn has {} roots, expected {n}", target.n)));
    }
    let xs = target.coords();
    let base_a = &xs[n - 1] / int(p as i64);
    if base_a >= base_bound(p) {
        return Err(DegreeLabError::Schedule("largest thorn coordinate must be below 1".into()));
    }
    let mut q = BKVector::base(m, p, base_a);
    for (step, &i) in sigma.entries().iter().enumerate().skip(1) {
        let i = i as usize;
        let defect_after = n - step - 1;
        let walk_err = |reason: String| DegreeLabError::Walk { step: step + 1, reason };
        let a = predicted_parameter(&q, i, &xs[defect_after])?;
        let moved = apply_f_unchecked(&q, i, &round_significant(&a, WALK_BITS))?;
        q = correct_stage(&moved, &xs[defect_after..]).ok_or_else(|| walk_err("Newton correction diverged".into()))?;
        check_bk(&q).map_err(|e| walk_err(e.to_string()))?;
    }
    Ok(q)
}

/// The span of `q_1, ..., q_p` in big-cell coordinates.
pub fn bk_to_big_cell(q: &BKVector) -> BigCellPoint {
    let (m, p) = (q.m(), q.p());
    let qs = q.polys();
    let mut kcoef = QMatrix::zeros(m, p);
    for j in 0..p {
        // f_{j+1} has degree m+p-1-j and no terms z^m .. z^{m+p-2-j}
        let top = p - 1 - j;
        let lower = top;
        let rhs: Vec<Rational> = (0..lower).map(|e| -qs[top].coeff(m + e)).collect();
        let mat = QMatrix::from_fn(lower, lower, |e, c| qs[c].coeff(m + e));
        let c = if lower == 0 { Vec::new() } else { mat.solve(&rhs).expect("triangular with unit diagonal") };
        let mut f = qs[top].clone();
        for (ci, qi) in c.iter().zip(&qs) {
            f += &qi.scale(ci);
        }
        for r in 0..m {
            kcoef[(r, j)] = -f.coeff(m - 1 - r);
        }
    }
    BigCellPoint { m, p, kcoef }
}

/// Monic basis `q_i` of degree `m+i-1` with `z^{i-1} | q_i`. Coefficients
/// are not checked for sign; `None` when the point is not in this chart.
pub fn big_cell_to_bk(b: &BigCellPoint) -> Option<BKVector> {
    let (m, p) = (b.m, b.p);
    let fs = crate::grassmann::big_cell_polys(b);
    let mut qs = Vec::with_capacity(p);
    for i in 0..p {
        // q_{i+1} = f_{p-i} + sum_{j > p-i} c_j f_j, killing z^0 .. z^{i-1}
        let lead = p - 1 - i;
        let others: Vec<usize> = (lead + 1..p).collect();
        let rhs: Vec<Rational> = (0..i).map(|e| -fs[lead].coeff(e)).collect();
        let mat = QMatrix::from_fn(i, i, |e, c| fs[others[c]].coeff(e));
        let c = if i == 0 { Vec::new() } else { mat.solve(&rhs)? };
        let mut q = fs[lead].clone();
        for (ci, &j) in c.iter().zip(&others) {
            q += &fs[j].scale(ci);
        }
        qs.push(q);
    }
    let mut k = Vec::new();
    let mut rows = Vec::new();
    for (i, q) in qs.iter().enumerate() {
        let ki = q.order_at_zero()?;
        if ki != i {
            return None;
        }
        k.push(ki);
        rows.push((ki..m + i).map(|l| q.coeff(l)).collect::<Vec<_>>());
    }
    let k = MultiIndexK::new(m, k).ok()?;
    let flat: Vec<Rational> = rows.into_iter().flatten().collect();
    Some(BKVector::from_coeffs(k, &flat).expect("row lengths match"))
}

/// Whether every coefficient is positive (a necessary condition for `b(k)`).
pub fn all_positive(q: &BKVector) -> bool {
    q.coeffs().iter().all(|a| a > &Rational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::enumerate_ballot;
    use crate::grassmann::{big_cell_polys, wronski_map};
    use crate::polynomials::wronskian;
    use crate::rational::frac;

    fn sched(n: usize) -> Vec<Rational> {
        squaring_schedule(n)
    }

    #[test]
    fn both_22_chains_validate_and_rank() {
        let mut ranks = Vec::new();
        for sigma in enumerate_ballot(2, 2) {
            let q = seed_chain(&sigma, &sched(4)).unwrap();
            assert_eq!(q.k().defect(), 0);
            let r = recover_sigma(&q).unwrap();
            assert_eq!(r, sigma);
            ranks.push(r);
        }
        assert_ne!(ranks[0], ranks[1]);
    }

    #[test]
    fn sorted_sigma_fills_first_row_first() {
        let sigma = BallotSequence::new(vec![1, 1, 1, 2, 2, 2], 3, 2).unwrap();
        let q = seed_chain(&sigma, &sched(6)).unwrap();
        let s = sched(6);
        assert_eq!(q.rows()[0], vec![s[2].clone(), s[1].clone(), s[0].clone()]);
    }

    #[test]
    fn schedule_checks() {
        let sigma = BallotSequence::new(vec![1, 2, 1, 2], 2, 2).unwrap();
        let mut s = sched(4);
        s.swap(1, 2);
        assert!(matches!(seed_chain(&sigma, &s), Err(DegreeLabError::Schedule(_))));
        let big = vec![int(1), frac(1, 4), frac(1, 16), frac(1, 64)];
        let geometric = vec![frac(1, 4), frac(1, 16), frac(1, 64), frac(1, 256)];
        assert!(matches!(seed_chain(&sigma, &geometric), Err(DegreeLabError::Walk { .. })));
        assert!(matches!(seed_chain(&sigma, &big), Err(DegreeLabError::Schedule(_))));
    }

    #[test]
    fn chart_round_trip() {
        let sigma = BallotSequence::new(vec![1, 2, 1, 2, 1, 2], 3, 2).unwrap();
        let q = seed_chain(&sigma, &sched(6)).unwrap();
        let b = bk_to_big_cell(&q);
        let w1 = wronskian(&big_cell_polys(&b)).unwrap();
        assert!(w1.is_proportional(&q.wronskian()));
        assert!(wronski_map(&b.to_matrix()).is_proportional(&q.wronskian()));
        assert_eq!(big_cell_to_bk(&b).unwrap(), q);
    }

    #[test]
    fn thorn_walk_hits_target() {
        let t = ThornTarget::new(frac(1, 100), 4).unwrap();
        for sigma in enumerate_ballot(2, 2) {
            let q = thorn_walk(&sigma, &t).unwrap();
            let w = q.wronskian().monic();
            for (a, b) in w.coeffs().iter().zip(t.polynomial().coeffs()) {
                assert!((a - b).abs() <= b.abs() * pow2(-200));
            }
        }
    }

    #[test]
    fn sign_law_factor_list() {
        let sigma = BallotSequence::new(vec![1, 2, 1, 2], 2, 2).unwrap();
        // k: (1,3) -F2-> (1,2) -F1-> (0,2) -F2-> (0,1); chi = 1, 0, 2
        assert_eq!(sign_law_factors(&sigma), vec![-1, 1, 1]);
    }
}
