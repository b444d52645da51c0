//! Dual-backend scalars.
//!
//! `Exact` values are arbitrary-precision rationals and stay exact under
//! every operation. `Approx` values are double-double floats; any operation
//! touching one promotes the result to `Approx`.

use alloc::format;
use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::Error;

pub type Rational = BigRational;

/// Default relative tolerance for `Approx` comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rational),
    Approx(TwoFloat),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn rational_to_twofloat(r: &Rational) -> TwoFloat {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return TwoFloat::from(hi);
    }
    let rest = r - Rational::from_float(hi).unwrap_or_else(Rational::zero);
    let lo = rest.to_f64().unwrap_or(0.0);
    TwoFloat::new_add(hi, lo)
}

fn tf_abs(x: TwoFloat) -> f64 {
    x.hi().abs()
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(rat(n, d))
    }

    pub fn approx(x: f64) -> Self {
        Scalar::Approx(TwoFloat::from(x))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    /// Same value on the `Approx` backend.
    pub fn to_approx(&self) -> Self {
        Scalar::Approx(self.to_twofloat())
    }

    pub fn to_twofloat(&self) -> TwoFloat {
        match self {
            Scalar::Exact(r) => rational_to_twofloat(r),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(x) => x.hi() + x.lo(),
        }
    }

    /// Exact zero test, or `|x| <= DEFAULT_TOL` on the approximate backend.
    pub fn is_zero(&self) -> bool {
        self.is_zero_tol(DEFAULT_TOL)
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(x) => tf_abs(*x) <= tol,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one()
    }

    /// `|a-b| <= tol * max(1, |a|, |b|)`, exact equality when both are exact.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let a = self.to_twofloat();
                let b = other.to_twofloat();
                let scale = 1f64.max(tf_abs(a)).max(tf_abs(b));
                tf_abs(a - b) <= tol * scale
            }
        }
    }

    /// Sign as -1, 0 or 1; approximate values within tolerance of zero count as 0.
    pub fn signum(&self) -> i8 {
        match self {
            Scalar::Exact(r) => match r.cmp(&Rational::zero()) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            },
            Scalar::Approx(x) => {
                if tf_abs(*x) <= DEFAULT_TOL {
                    0
                } else if x.hi() < 0.0 {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(x) => Scalar::Approx(x.abs()),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero_tol(0.0) {
            return None;
        }
        match self {
            Scalar::Exact(r) => Some(Scalar::Exact(r.recip())),
            Scalar::Approx(x) => Some(Scalar::Approx(x.recip())),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(num_traits::Pow::pow(r, n)),
            Scalar::Approx(x) => Scalar::Approx(x.powi(n)),
        }
    }

    /// Square root; exact when the argument is the square of a rational.
    pub fn sqrt(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        if let Scalar::Exact(r) = self {
            if let Some(root) = exact_root(r, 2) {
                return Some(Scalar::Exact(root));
            }
        }
        Some(Scalar::Approx(self.to_twofloat().sqrt()))
    }

    /// Real cube root; exact when the argument is the cube of a rational.
    pub fn cbrt(&self) -> Self {
        if let Scalar::Exact(r) = self {
            if let Some(root) = exact_root(r, 3) {
                return Scalar::Exact(root);
            }
        }
        Scalar::Approx(self.to_twofloat().cbrt())
    }

    /// Replace by exact zero when `|x| <= tol`.
    pub fn threshold(&self, tol: f64) -> Self {
        match self {
            Scalar::Approx(x) if tf_abs(*x) <= tol => Scalar::Approx(TwoFloat::from(0.0)),
            _ => self.clone(),
        }
    }
}

fn exact_root(r: &Rational, k: u32) -> Option<Rational> {
    let n = r.numer();
    let d = r.denom();
    if k % 2 == 0 && n.is_negative() {
        return None;
    }
    let rn = n.nth_root(k);
    let rd = d.nth_root(k);
    if num_traits::Pow::pow(&rn, k) == *n && num_traits::Pow::pow(&rd, k) == *d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::approx(x)
    }
}

/// Exact pairs compare exactly; anything involving `Approx` compares with
/// `DEFAULT_TOL`. The relation is therefore not transitive on approximate values.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, DEFAULT_TOL)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => {
                if self == other {
                    Some(Ordering::Equal)
                } else {
                    self.to_twofloat().partial_cmp(&other.to_twofloat())
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r),
            Scalar::Approx(x) => {
                let v = x.hi() + x.lo();
                let s = format!("{:?}", v);
                if s.contains(['.', 'e', 'N', 'i']) {
                    f.write_str(&s)
                } else {
                    write!(f, "{}.0", s)
                }
            }
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Integers and `p/q` parse exactly; decimal literals parse as `Approx`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().replace('\u{2212}', "-");
        let err = |m: &str| Error::Parse { offset: 0, message: format!("{m}: {s:?}") };
        if t.is_empty() {
            return Err(err("empty scalar"));
        }
        if t.contains(['.', 'e', 'E']) {
            let v: f64 = t.parse().map_err(|_| err("bad decimal literal"))?;
            return Ok(Scalar::approx(v));
        }
        let parse_int = |x: &str| -> Result<BigInt, Error> {
            let x = x.trim();
            let x = x.strip_prefix('+').unwrap_or(x);
            BigInt::from_str(x).map_err(|_| err("bad integer"))
        };
        match t.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(err("zero denominator"));
                }
                Ok(Scalar::Exact(Rational::new(parse_int(n)?, d)))
            }
            None => Ok(Scalar::Exact(Rational::from_integer(parse_int(&t)?))),
        }
    }
}

fn binop(
    a: &Scalar,
    b: &Scalar,
    fe: impl FnOnce(&Rational, &Rational) -> Rational,
    fa: impl FnOnce(TwoFloat, TwoFloat) -> TwoFloat,
) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(fe(x, y)),
        _ => Scalar::Approx(fa(a.to_twofloat(), b.to_twofloat())),
    }
}

macro_rules! impl_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                binop(self, rhs, |x, y| x $op y, |x, y| x $op y)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);
impl_binop!(Div, div, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => *x += y,
            _ => *self = &*self + rhs,
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => *x -= y,
            _ => *self = &*self - rhs,
        }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl core::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

impl<'a> core::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Render a scalar list for diagnostics.
pub fn join(xs: &[Scalar]) -> String {
    let parts: alloc::vec::Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_closed() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(2, 3);
        let c = &a + &b;
        assert!(c.is_exact());
        assert!(c.is_one());
        assert_eq!((&a * &b).to_string(), "2/9");
    }

    #[test]
    fn mixed_promotes() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::approx(0.5);
        assert!(!(&a + &b).is_exact());
        assert!(!(&b * &a).is_exact());
    }

    #[test]
    fn approx_keeps_double_double_precision() {
        let third = Scalar::ratio(1, 3).to_approx();
        let back = &third * &Scalar::int(3) - Scalar::one();
        assert!(back.to_twofloat().hi().abs() < 1e-30);
    }

    #[test]
    fn tolerance_is_relative() {
        let a = Scalar::approx(1e12);
        let b = Scalar::approx(1e12 + 1.0);
        assert!(a.approx_eq(&b, DEFAULT_TOL));
        assert!(!Scalar::approx(1.0).approx_eq(&Scalar::approx(1.0 + 1e-9), DEFAULT_TOL));
    }

    #[test]
    fn roots() {
        assert_eq!(Scalar::ratio(9, 4).sqrt().unwrap().to_string(), "3/2");
        assert!(Scalar::int(2).sqrt().unwrap().approx_eq(&Scalar::approx(core::f64::consts::SQRT_2), 1e-15));
        assert_eq!(Scalar::ratio(-27, 8).cbrt().to_string(), "-3/2");
        let c = Scalar::ratio(3, 2).cbrt();
        assert!(!c.is_exact());
        assert!((c.powi(3) - Scalar::ratio(3, 2)).to_twofloat().hi().abs() < 1e-28);
        assert!(Scalar::int(-1).sqrt().is_none());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("-3/6".parse::<Scalar>().unwrap().to_string(), "-1/2");
        assert_eq!("\u{2212}2".parse::<Scalar>().unwrap(), Scalar::int(-2));
        let d = "0.25".parse::<Scalar>().unwrap();
        assert!(!d.is_exact());
        assert_eq!(Scalar::approx(2.0).to_string(), "2.0");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(Scalar::ratio(-1, 7).signum(), -1);
        assert_eq!(Scalar::approx(1e-12).signum(), 0);
        assert_eq!(Scalar::zero().signum(), 0);
    }
}
