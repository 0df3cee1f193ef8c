//! Scalar fields the library computes over.
//!
//! Structural work (products of elementary matrices, congruences, template
//! matching) runs over exact rationals. Spectral work needs floating point,
//! so `f64` and `Complex64` implement the same trait.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Which concrete field a value lives in. Used by JSON I/O.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Rational,
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Rational => "rational",
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    pub fn parse(s: &str) -> Result<Field> {
        match s {
            "rational" => Ok(Field::Rational),
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::Parse(format!("unknown field `{other}`"))),
        }
    }
}

/// Absolute threshold under which a floating point value counts as zero
/// in structural comparisons.
pub const FLOAT_ZERO_TOL: f64 = 1e-10;

/// A field element.
///
/// The `*_ref` methods exist so that generic code can avoid cloning big
/// rationals on every operation.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const FIELD: Field;
    /// Equality is exact (no rounding anywhere).
    const EXACT: bool;
    /// Conjugation is non-trivial.
    const COMPLEX: bool;

    fn from_i64(v: i64) -> Self;
    fn conj(&self) -> Self;
    /// Exact zero test for exact fields; `|x| <= FLOAT_ZERO_TOL` otherwise.
    fn is_negligible(&self) -> bool;
    /// Magnitude used to choose pivots.
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn add_ref(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.clone() - o.clone()
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    fn div_ref(&self, o: &Self) -> Self {
        self.clone() / o.clone()
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

pub type Rational = BigRational;

/// Builds a rational from an integer.
pub fn rat(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Builds the rational `p/q`.
pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Scalar for Rational {
    const FIELD: Field = Field::Rational;
    const EXACT: bool = true;
    const COMPLEX: bool = false;

    fn from_i64(v: i64) -> Self {
        rat(v)
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn to_json(&self) -> Value {
        if self.is_integer() {
            Value::String(self.numer().to_string())
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(rat(i)),
                None => Err(Error::Parse(format!("non-integer number {n} for a rational; use \"p/q\""))),
            },
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;
    const EXACT: bool = false;
    const COMPLEX: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_negligible(&self) -> bool {
        self.abs() <= FLOAT_ZERO_TOL
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn to_json(&self) -> Value {
        serde_json::json!(*self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad real {n}"))),
            Value::String(s) => parse_rational(s)?
                .to_f64()
                .ok_or_else(|| Error::Parse(format!("bad real {s}"))),
            other => Err(Error::Parse(format!("expected real, got {other}"))),
        }
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;
    const EXACT: bool = false;
    const COMPLEX: bool = true;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_negligible(&self) -> bool {
        self.norm() <= FLOAT_ZERO_TOL
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_json(&self) -> Value {
        serde_json::json!([self.re, self.im])
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Array(a) if a.len() == 2 => {
                let re = f64::from_json(&a[0])?;
                let im = f64::from_json(&a[1])?;
                Ok(Complex64::new(re, im))
            }
            other => Ok(Complex64::new(f64::from_json(other)?, 0.0)),
        }
    }
}
