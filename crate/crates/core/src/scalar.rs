//! Scalar abstraction shared by the geometry and LP code.
//!
//! Everything numeric is generic over [`Scalar`]. The exact instantiation is
//! [`Rational`](crate::Rational) (`BigRational`); `f64`/`f32` are supported
//! for quick approximate evaluation with a fixed absolute tolerance in the
//! simplex, so any result that certifies something is computed over rationals.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An ordered field element usable by the generic algorithms.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_integer(n: &BigInt) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// True when the type computes without rounding.
    fn is_exact() -> bool;

    /// Magnitude below which a value counts as zero in pivoting decisions;
    /// zero for exact types.
    fn tolerance() -> Self;

    /// `self < 0` beyond the tolerance.
    fn is_neg_tol(&self) -> bool {
        if Self::is_exact() {
            self.is_negative()
        } else {
            *self < -Self::tolerance()
        }
    }

    /// `self > 0` beyond the tolerance.
    fn is_pos_tol(&self) -> bool {
        if Self::is_exact() {
            self.is_positive()
        } else {
            *self > Self::tolerance()
        }
    }

    fn is_zero_tol(&self) -> bool {
        !self.is_neg_tol() && !self.is_pos_tol()
    }

    fn from_i64(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("i64 is representable")
    }

    /// `self -= a * b` without cloning the operands.
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self = self.clone() - a.clone() * b.clone();
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn div_ref(&self, other: &Self) -> Self {
        self.clone() / other.clone()
    }
}

impl Scalar for BigRational {
    fn from_integer(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
}

impl Scalar for f64 {
    fn from_integer(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }

    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn from_integer(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }

    fn is_exact() -> bool {
        false
    }

    fn tolerance() -> Self {
        1e-5
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn floor(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &BigRational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// The largest integer strictly below `r`.
pub fn floor_strict(r: &BigRational) -> BigInt {
    let f = floor(r);
    if r.is_integer() {
        f - 1
    } else {
        f
    }
}

/// `num/den`, or `num` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation rounded half-up to `places` digits, computed exactly.
pub fn format_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = r * BigRational::from_integer(scale.clone()) + rat(1, 2);
    let n = floor(&scaled);
    let negative = n.is_negative();
    let n = n.abs();
    let (whole, frac) = n.div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = places as usize)
}

/// `num/den (~d.dddddd)` as used in human-facing output.
pub fn format_with_decimal(r: &BigRational) -> String {
    format!("{} (~{})", format_rational(r), format_decimal(r, 6))
}

/// Parses `n`, `n/d` or a finite decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidNumber(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((w, f)) = s.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = w.starts_with('-');
        let w: BigInt = if w.is_empty() || w == "-" || w == "+" {
            BigInt::zero()
        } else {
            w.parse().map_err(|_| bad())?
        };
        let frac: BigInt = f.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(f.len() as u32);
        let mag = BigRational::new(w.abs() * &scale + frac, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn parse_integer(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidNumber(s.to_string()))
}

pub fn pow_rational(base: &BigRational, exp: i64) -> BigRational {
    let mag = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}
