//! Real root isolation with Sturm sequences and square-free decomposition.

use super::RationalPoly;
use crate::rational::{sign, to_f64, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
}

/// Yun's algorithm: returns monic square-free, pairwise coprime factors
/// `(g_i, i)` with `f = lc * prod g_i^i`. Constant factors are omitted.
pub fn square_free_decomposition(f: &RationalPoly) -> Vec<(RationalPoly, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    let a = f.gcd(&df);
    let mut b = f.exact_div(&a).expect("gcd divides f").monic();
    let mut c = df.exact_div(&a).expect("gcd divides f'").scale(&f.leading().unwrap().recip());
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let g = b.gcd(&d);
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        b = b.exact_div(&g).expect("gcd divides b");
        c = d.exact_div(&g).expect("gcd divides d");
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Strict bound on the absolute value of every complex root.
pub fn cauchy_bound(f: &RationalPoly) -> Rational {
    let lc = f.leading().expect("nonzero polynomial").abs();
    let n = f.degree().unwrap();
    let max = f.coeffs()[..n].iter().map(|c| c.abs() / &lc).fold(Rational::zero(), |m, v| if v > m { v } else { m });
    max + Rational::one()
}

#[derive(Debug, Clone)]
pub struct SturmSequence {
    seq: Vec<RationalPoly>,
    ints: Vec<Vec<BigInt>>,
}

impl SturmSequence {
    pub fn new(f: &RationalPoly) -> Self {
        let mut seq = vec![f.clone()];
        let df = f.derivative();
        if !df.is_zero() {
            seq.push(df);
        }
        while seq.len() >= 2 {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            // positive rescaling keeps signs and tames coefficient growth
            let c = crate::rational::content(r.coeffs());
            seq.push(-&r.scale(&c.recip()));
        }
        let ints = seq.iter().map(integer_coeffs).collect();
        SturmSequence { seq, ints }
    }

    fn variations(signs: impl Iterator<Item = i32>) -> usize {
        let nz: Vec<i32> = signs.filter(|&s| s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.ints.iter().map(|c| sign_at(c, x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.seq.iter().map(|p| {
            let s = sign(p.leading().unwrap());
            let odd = p.degree().unwrap() % 2 == 1;
            if !positive && odd { -s } else { s }
        }))
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    /// Distinct real roots on the whole line.
    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false).saturating_sub(self.variations_at_infinity(true))
    }
}

/// A real root of a square-free factor, isolated by a rational interval.
///
/// Either `lo == hi` (the root is exactly `lo`), or `lo < hi`, the factor is
/// nonzero at both ends with opposite signs, and it has exactly one root in
/// between.
#[derive(Debug, Clone)]
pub struct RealRoot {
    /// The square-free factor scaled to integer coefficients.
    ints: Arc<Vec<BigInt>>,
    lo: Rational,
    hi: Rational,
    multiplicity: usize,
}

impl RealRoot {
    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    /// Nearest `f64`, refining a copy of the interval to 60 relative bits.
    pub fn to_f64(&self) -> f64 {
        let mut r = self.clone();
        let floor = crate::rational::pow2(-1100);
        loop {
            let mid = r.midpoint();
            let tol = (mid.abs() * crate::rational::pow2(-60)).max(floor.clone());
            if r.is_exact() || r.width() <= tol {
                return to_f64(&mid);
            }
            r.refine_to(&(r.width() / Rational::from_integer(2.into())));
        }
    }

    fn bisect(&mut self) {
        let mid = self.midpoint();
        let v = sign_at(&self.ints, &mid);
        if v == 0 {
            self.lo = mid.clone();
            self.hi = mid;
        } else if v == sign_at(&self.ints, &self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Shrinks the interval to a bracket of relative width `2^-32` around
    /// the Newton iterate from the midpoint, if the sign change is there.
    fn newton_shrink(&mut self) -> bool {
        let mid = self.midpoint();
        let df: Vec<BigInt> = self.ints.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        let d = value_at(&df, &mid);
        if d.is_zero() {
            return false;
        }
        let x = &mid - value_at(&self.ints, &mid) / d;
        let e = self.width() * crate::rational::pow2(-32);
        let q = &e / Rational::from_integer(4.into());
        let x = (x / &q).round() * &q;
        let (lo, hi) = (&x - &e, &x + &e);
        if lo <= self.lo || hi >= self.hi {
            return false;
        }
        let (sl, sh) = (sign_at(&self.ints, &lo), sign_at(&self.ints, &hi));
        if sl == 0 || sh == 0 {
            let r = if sl == 0 { lo } else { hi };
            self.lo = r.clone();
            self.hi = r;
            true
        } else if sl != sh {
            self.lo = lo;
            self.hi = hi;
            true
        } else {
            false
        }
    }

    /// Shrinks the isolating interval until it is no wider than `width`.
    pub fn refine_to(&mut self, width: &Rational) {
        while !self.is_exact() && &self.width() > width {
            if !self.newton_shrink() {
                self.bisect();
            }
        }
    }

    /// Compares the root with `x`, shrinking the interval when needed.
    pub fn cmp_value(&mut self, x: &Rational) -> Ordering {
        if self.is_exact() {
            return self.lo.cmp(x);
        }
        if x <= &self.lo {
            return Ordering::Greater;
        }
        if x >= &self.hi {
            return Ordering::Less;
        }
        let v = sign_at(&self.ints, x);
        if v == 0 {
            self.lo = x.clone();
            self.hi = x.clone();
            Ordering::Equal
        } else if v == sign_at(&self.ints, &self.lo) {
            self.lo = x.clone();
            Ordering::Greater
        } else {
            self.hi = x.clone();
            Ordering::Less
        }
    }

    fn overlaps(&self, other: &RealRoot) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Unbounded,
    Open(Rational),
    Closed(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: Bound,
    pub hi: Bound,
}

impl RealInterval {
    pub fn all() -> Self {
        RealInterval { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn open(a: Rational, b: Rational) -> Self {
        RealInterval { lo: Bound::Open(a), hi: Bound::Open(b) }
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        RealInterval { lo: Bound::Closed(a), hi: Bound::Closed(b) }
    }

    /// `(a, b]`
    pub fn left_open(a: Rational, b: Rational) -> Self {
        RealInterval { lo: Bound::Open(a), hi: Bound::Closed(b) }
    }

    fn admits(&self, root: &mut RealRoot) -> bool {
        let lo_ok = match &self.lo {
            Bound::Unbounded => true,
            Bound::Open(a) => root.cmp_value(a) == Ordering::Greater,
            Bound::Closed(a) => root.cmp_value(a) != Ordering::Less,
        };
        lo_ok
            && match &self.hi {
                Bound::Unbounded => true,
                Bound::Open(b) => root.cmp_value(b) == Ordering::Less,
                Bound::Closed(b) => root.cmp_value(b) != Ordering::Greater,
            }
    }
}

/// Isolated real roots in ascending order with pairwise disjoint intervals.
#[derive(Debug, Clone, Default)]
pub struct RootList {
    roots: Vec<RealRoot>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RealRoot> {
        self.roots.iter()
    }

    pub fn roots(&self) -> &[RealRoot] {
        &self.roots
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn refine_all(&mut self, width: &Rational) {
        for r in &mut self.roots {
            r.refine_to(width);
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.roots.iter().map(RealRoot::to_f64).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.roots.iter().map(|r| r.multiplicity).collect()
    }
}

impl IntoIterator for RootList {
    type Item = RealRoot;
    type IntoIter = std::vec::IntoIter<RealRoot>;
    fn into_iter(self) -> Self::IntoIter {
        self.roots.into_iter()
    }
}

/// Coefficients of `c * g` for the least positive `c` making them integers.
fn integer_coeffs(g: &RationalPoly) -> Vec<BigInt> {
    let l = g.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    g.coeffs().iter().map(|c| c.numer() * (&l / c.denom())).collect()
}

/// Sign of `g(a/b)` from the integer coefficients of `g`, via
/// `b^d g(a/b) = sum c_i a^i b^(d-i)` with `b > 0`.
fn sign_at(ints: &[BigInt], x: &Rational) -> i32 {
    let Some((last, rest)) = ints.split_last() else { return 0 };
    let (a, b) = (x.numer(), x.denom());
    let mut acc = last.clone();
    let mut bp = BigInt::one();
    for c in rest.iter().rev() {
        bp *= b;
        acc = acc * a + c * &bp;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// `g(x)` from the integer coefficients (up to the positive scale).
fn value_at(ints: &[BigInt], x: &Rational) -> Rational {
    let Some((last, rest)) = ints.split_last() else { return Rational::zero() };
    let (a, b) = (x.numer(), x.denom());
    let mut acc = last.clone();
    let mut bp = BigInt::one();
    for c in rest.iter().rev() {
        bp *= b;
        acc = acc * a + c * &bp;
    }
    Rational::new(acc, bp)
}

fn isolate_square_free(g: &RationalPoly, multiplicity: usize, out: &mut Vec<RealRoot>) {
    let ints = Arc::new(integer_coeffs(g));
    let root = |lo: Rational, hi: Rational| RealRoot { ints: ints.clone(), lo, hi, multiplicity };
    if g.degree() == Some(1) {
        let r = -g.coeff(0) / g.coeff(1);
        out.push(root(r.clone(), r));
        return;
    }
    let sturm = SturmSequence::new(g);
    let b = cauchy_bound(g);
    let two = Rational::from_integer(2.into());
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => {
                if g.eval(&hi).is_zero() {
                    out.push(root(hi.clone(), hi));
                } else if g.eval(&lo).is_zero() {
                    // lo is a neighbouring root outside (lo, hi]; move it inside
                    let mid = (&lo + &hi) / &two;
                    if sturm.count(&mid, &hi) == 1 {
                        stack.push((mid, hi));
                    } else {
                        stack.push((lo, mid));
                    }
                } else {
                    out.push(root(lo, hi));
                }
            }
            _ => {
                let mid = (&lo + &hi) / &two;
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
}

/// Real roots of `f` inside `interval`, with multiplicities.
pub fn real_roots(f: &RationalPoly, interval: &RealInterval) -> Result<RootList, RootError> {
    if f.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    for (g, mult) in square_free_decomposition(f) {
        isolate_square_free(&g, mult, &mut roots);
    }
    // roots of distinct factors are distinct, so refinement separates them
    loop {
        let mut clash = None;
        'outer: for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if roots[i].overlaps(&roots[j]) {
                    clash = Some((i, j));
                    break 'outer;
                }
            }
        }
        match clash {
            Some((i, j)) => {
                roots[i].bisect();
                roots[j].bisect();
            }
            None => break,
        }
    }
    roots.retain_mut(|r| interval.admits(r));
    roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(RootList { roots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn mults(l: &RootList) -> Vec<(f64, usize)> {
        l.iter().map(|r| (r.to_f64(), r.multiplicity())).collect()
    }

    #[test]
    fn simple_roots_of_z2_minus_1() {
        let l = real_roots(&RationalPoly::from_i64(&[-1, 0, 1]), &RealInterval::all()).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(mults(&l), vec![(-1.0, 1), (1.0, 1)]);
    }

    #[test]
    fn multiple_root_at_zero() {
        // z^3 (z + 2)
        let f = RationalPoly::from_i64(&[0, 0, 0, 2, 1]);
        let l = real_roots(&f, &RealInterval::all()).unwrap();
        assert_eq!(mults(&l), vec![(-2.0, 1), (0.0, 3)]);
        assert_eq!(l.total_multiplicity(), 4);
    }

    #[test]
    fn no_real_roots() {
        let l = real_roots(&RationalPoly::from_i64(&[1, 0, 1]), &RealInterval::all()).unwrap();
        assert!(l.is_empty());
        assert_eq!(
            real_roots(&RationalPoly::zero(), &RealInterval::all()).unwrap_err(),
            RootError::ZeroPolynomial
        );
    }

    #[test]
    fn interval_filtering_respects_endpoints() {
        // roots -1, -1/2 (double), 0
        let f = &RationalPoly::from_roots(&[int(-1), frac(-1, 2), frac(-1, 2)]) * &RationalPoly::z();
        let l = real_roots(&f, &RealInterval::left_open(int(-1), int(0))).unwrap();
        assert_eq!(mults(&l), vec![(-0.5, 2), (0.0, 1)]);
        let l = real_roots(&f, &RealInterval::open(int(-1), int(0))).unwrap();
        assert_eq!(l.len(), 1);
        let l = real_roots(&f, &RealInterval::closed(int(-1), int(0))).unwrap();
        assert_eq!(l.len(), 3);
    }

    #[test]
    fn irrational_roots_refine() {
        // z^2 - 2
        let mut l = real_roots(&RationalPoly::from_i64(&[-2, 0, 1]), &RealInterval::all()).unwrap();
        l.refine_all(&frac(1, 1 << 40));
        let v = l.to_f64();
        assert!((v[1] - 2f64.sqrt()).abs() < 1e-11);
        assert!((v[0] + 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn close_roots_are_separated() {
        let f = RationalPoly::from_roots(&[frac(1, 1000), frac(1001, 1_000_000), frac(-3, 7)]);
        let l = real_roots(&f, &RealInterval::all()).unwrap();
        assert_eq!(l.len(), 3);
        for w in l.roots().windows(2) {
            assert!(w[0].hi() <= w[1].lo());
        }
    }

    #[test]
    fn square_free_parts() {
        let f = &RationalPoly::from_roots(&[int(1), int(1), int(2), int(3), int(3), int(3)])
            .scale(&int(5))
            * &RationalPoly::from_i64(&[1, 0, 1]);
        let parts = square_free_decomposition(&f);
        let got: Vec<(Option<usize>, usize)> = parts.iter().map(|(g, i)| (g.degree(), *i)).collect();
        assert_eq!(got, vec![(Some(3), 1), (Some(1), 2), (Some(1), 3)]);
    }

    #[test]
    fn sturm_counts_match_construction() {
        let f = RationalPoly::from_roots(&[int(-3), frac(1, 2), int(4), int(7)]);
        let s = SturmSequence::new(&f);
        assert_eq!(s.count_all(), 4);
        assert_eq!(s.count(&int(0), &int(4)), 2);
        assert_eq!(s.count(&int(4), &int(10)), 1);
    }
}
