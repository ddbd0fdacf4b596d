//! Exact Gaussian-rational arithmetic and the floating complex scalar.
//!
//! [`GaussianRational`] is the exact carrier used by the symbolic engine;
//! [`ComplexScalar`] is a plain `Complex64` used by every numeric route.
//! The [`Coeff`] trait lets the Möbius algebra run over either one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Floating complex scalar used by the numeric routes.
pub type ComplexScalar = Complex64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("component does not fit in a double")]
    Overflow,
    #[error("non-finite value produced")]
    NonFinite,
    #[error("invalid complex literal `{0}`")]
    Parse(String),
}

/// Returns `z` unchanged if both parts are finite.
pub fn ensure_finite(z: ComplexScalar) -> Result<ComplexScalar, ScalarError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(ScalarError::NonFinite)
    }
}

/// An element of ℚ(i). Both parts are kept in lowest terms by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// `p/q + (r/s)i`.
    ///
    /// Panics if `q` or `s` is zero.
    pub fn from_fractions(p: i64, q: i64, r: i64, s: i64) -> Self {
        Self::new(ratio(p, q), ratio(r, s))
    }

    /// Exact binary value of a double pair.
    pub fn from_complex(z: ComplexScalar) -> Result<Self, ScalarError> {
        let re = BigRational::from_float(z.re).ok_or(ScalarError::NonFinite)?;
        let im = BigRational::from_float(z.im).ok_or(ScalarError::NonFinite)?;
        Ok(Self::new(re, im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    /// Nearest double for each component.
    pub fn to_complex(&self) -> Result<ComplexScalar, ScalarError> {
        let re = rational_to_f64(&self.re)?;
        let im = rational_to_f64(&self.im)?;
        Ok(ComplexScalar::new(re, im))
    }
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn rational_to_f64(x: &BigRational) -> Result<f64, ScalarError> {
    match x.to_f64() {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(ScalarError::Overflow),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &'a GaussianRational) -> GaussianRational {
                let f: fn(&GaussianRational, &GaussianRational) -> GaussianRational = $body;
                f(self, rhs)
            }
        }
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| GaussianRational::new(&x.re + &y.re, &x.im + &y.im));
forward_binop!(Sub, sub, |x, y| GaussianRational::new(&x.re - &y.re, &x.im - &y.im));
forward_binop!(Mul, mul, |x, y| GaussianRational::new(
    &x.re * &y.re - &x.im * &y.im,
    &x.re * &y.im + &x.im * &y.re
));

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        parse_complex_literal(s)
    }
}

/// The four field operations plus conjugation and negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GqOp {
    Add,
    Sub,
    Mul,
    Div,
    Conj,
    Neg,
}

/// Applies `op` to `x` (and `y` for the binary ops).
///
/// A missing `y` for a binary op is treated as zero.
pub fn gq_arith(
    op: GqOp,
    x: &GaussianRational,
    y: Option<&GaussianRational>,
) -> Result<GaussianRational, ScalarError> {
    let zero = GaussianRational::zero();
    let y = y.unwrap_or(&zero);
    Ok(match op {
        GqOp::Add => x + y,
        GqOp::Sub => x - y,
        GqOp::Mul => x * y,
        GqOp::Div => x.checked_div(y)?,
        GqOp::Conj => x.conj(),
        GqOp::Neg => -x,
    })
}

pub fn gq_to_float(x: &GaussianRational) -> Result<ComplexScalar, ScalarError> {
    x.to_complex()
}

/// Parses `re`, `re+imi`, `re-imi` (and a bare `imi`), where each component
/// is a decimal (`-0.25`) or a fraction (`1/3`). No whitespace is allowed.
pub fn parse_complex_literal(s: &str) -> Result<GaussianRational, ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(err());
    }
    let Some(body) = s.strip_suffix('i') else {
        let re = parse_real(s).ok_or_else(err)?;
        return Ok(GaussianRational::new(re, BigRational::zero()));
    };
    // Split at the last sign that is not the leading one.
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i]).ok_or_else(err)?, parse_imag(&body[i..]).ok_or_else(err)?),
        None => (BigRational::zero(), parse_imag(body).ok_or_else(err)?),
    };
    Ok(GaussianRational::new(re, im))
}

fn parse_imag(s: &str) -> Option<BigRational> {
    match s {
        "" | "+" => Some(BigRational::one()),
        "-" => Some(-BigRational::one()),
        _ => parse_real(s),
    }
}

fn parse_real(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let value = match body.split_once('/') {
        Some((p, q)) => {
            let p = parse_decimal(p)?;
            let q = parse_decimal(q)?;
            if q.is_zero() {
                return None;
            }
            p / q
        }
        None => parse_decimal(body)?,
    };
    Some(if neg { -value } else { value })
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(numer, denom))
}

/// Field operations needed by the linear-fractional algebra, implemented
/// for both the floating and the exact scalar.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` when `rhs` is zero or the quotient is not representable.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;
}

impl Coeff for ComplexScalar {
    fn zero() -> Self {
        ComplexScalar::new(0.0, 0.0)
    }
    fn one() -> Self {
        ComplexScalar::new(1.0, 0.0)
    }
    fn conj(&self) -> Self {
        ComplexScalar::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if Coeff::is_zero(rhs) {
            return None;
        }
        ensure_finite(self / rhs).ok()
    }
}

impl Coeff for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        GaussianRational::checked_div(self, rhs).ok()
    }
}
