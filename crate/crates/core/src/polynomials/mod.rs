//! Exact univariate polynomials over the rationals.
//!
//! `RationalPoly` stores coefficients in ascending degree order. The vector is
//! empty for the zero polynomial and its last entry is nonzero otherwise.

mod roots;
mod wronskian;

pub use roots::{
    cauchy_bound, real_roots, square_free_decomposition, Bound, RealInterval, RealRoot, RootError,
    RootList, SturmSequence,
};
pub use wronskian::{critical_points, wronskian, wronskian_partial, PolyMatrix, WronskianError};

use crate::linalg::RationalRepr;
use crate::rational::{format_rational, int, Rational};
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    fn trim(mut self) -> Self {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalPoly { coeffs: vec![c] }.trim()
    }

    /// `c * z^deg`.
    pub fn monomial(c: Rational, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        RationalPoly { coeffs }
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// From ascending coefficients; trailing zeros are dropped.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        RationalPoly { coeffs }.trim()
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::from_coeffs(vec![-r.clone(), Rational::one()])
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Multiplicity of the root at zero; `None` for the zero polynomial.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + crate::rational::to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::rational::to_f64).collect()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    /// Flips the sign if needed so that the leading coefficient is positive.
    pub fn with_positive_leading(&self) -> Self {
        match self.leading() {
            Some(lc) if lc.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        RationalPoly { coeffs }
    }

    /// Drops the `k` lowest coefficients, i.e. the quotient by `z^k`.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Quotient of an exact division; returns `None` if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// True when `self = c * other` for some nonzero rational `c`.
    pub fn is_proportional(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.degree() == other.degree() && self.monic() == other.monic()
    }

    /// Number of sign changes in the coefficient sequence.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<bool> =
            self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{}", format_rational(&abs))?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl AddAssign<&RationalPoly> for RationalPoly {
    fn add_assign(&mut self, rhs: &RationalPoly) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RationalPoly> for RationalPoly {
    fn sub_assign(&mut self, rhs: &RationalPoly) {
        *self = &*self - rhs;
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[derive(Serialize, Deserialize)]
struct PolyJson<T> {
    coeffs: Vec<T>,
}

/// `{"coeffs": ["num/den", ...]}` in ascending degree.
impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson { coeffs: self.coeffs.iter().map(format_rational).collect::<Vec<_>>() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: PolyJson<RationalRepr> = PolyJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(RationalRepr::into_rational)
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(RationalPoly::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn trims_and_reports_degree() {
        let p = RationalPoly::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(RationalPoly::from_i64(&[0, 0]).degree(), None);
        assert!(RationalPoly::constant(int(0)).is_zero());
    }

    #[test]
    fn division_and_gcd() {
        // (z-1)(z+2)(z-3) and (z-1)(z+5)
        let a = RationalPoly::from_roots(&[int(1), int(-2), int(3)]);
        let b = RationalPoly::from_roots(&[int(1), int(-5)]);
        let g = a.gcd(&b);
        assert_eq!(g, RationalPoly::from_i64(&[-1, 1]));
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(a.exact_div(&g).unwrap(), RationalPoly::from_roots(&[int(-2), int(3)]));
        assert!(a.exact_div(&RationalPoly::from_i64(&[7, 1])).is_none());
    }

    #[test]
    fn derivative_and_eval() {
        let p = RationalPoly::from_i64(&[1, 0, 3, 2]);
        assert_eq!(p.derivative(), RationalPoly::from_i64(&[0, 6, 6]));
        assert_eq!(p.eval(&frac(1, 2)), frac(1, 1) + frac(3, 4) + frac(1, 4));
        assert_eq!(p.nth_derivative(4), RationalPoly::zero());
    }

    #[test]
    fn proportionality_and_display() {
        let p = RationalPoly::from_i64(&[0, -2, 0, 1]);
        assert!(p.is_proportional(&p.scale(&frac(-3, 7))));
        assert!(!p.is_proportional(&RationalPoly::from_i64(&[1, -2, 0, 1])));
        assert_eq!(p.to_string(), "z^3 - 2*z");
        assert_eq!(RationalPoly::from_coeffs(vec![frac(-1, 2)]).to_string(), "-1/2");
    }

    #[test]
    fn json_schema() {
        let p: RationalPoly = serde_json::from_str(r#"{"coeffs": ["1/2", "0.25", 3]}"#).unwrap();
        assert_eq!(p, RationalPoly::from_coeffs(vec![frac(1, 2), frac(1, 4), int(3)]));
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"coeffs":["1/2","1/4","3"]}"#);
        assert!(serde_json::from_str::<RationalPoly>(r#"{"coeffs": ["x"]}"#).is_err());
    }
}
