//! Numbers used for every probability, matrix entry and functional.
//!
//! [`QSqrt2`] is the exact field ℚ[√2]: a pair of big rationals `(a, b)`
//! standing for `a + b·√2`. Every constant appearing in the constructed
//! behaviors (1/8, (2 ± √2)/8, 2√2, ...) lives there, so all reproductions can
//! be checked with exact equality. [`Scalar`] wraps either an exact value or a
//! binary64 value and is what behaviors and matrices store.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default tolerance for float-mode equality checks.
pub const FLOAT_EPS: f64 = 1e-12;

/// Exact element `rat + irr·√2` of ℚ[√2].
///
/// The representation is canonical (both parts are reduced rationals and √2
/// is irrational), so structural equality is numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    rat: BigRational,
    irr: BigRational,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QSqrt2 {
    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        QSqrt2 { rat, irr }
    }

    pub fn from_rational(rat: BigRational) -> Self {
        QSqrt2 { rat, irr: BigRational::zero() }
    }

    /// `n/d` as an exact rational. Panics if `d == 0`.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(ratio(n, d))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// `(a_n/a_d) + (b_n/b_d)·√2`.
    pub fn from_parts(a_n: i64, a_d: i64, b_n: i64, b_d: i64) -> Self {
        QSqrt2 { rat: ratio(a_n, a_d), irr: ratio(b_n, b_d) }
    }

    pub fn sqrt2() -> Self {
        QSqrt2 { rat: BigRational::zero(), irr: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.irr
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    /// `a − b√2`.
    pub fn conjugate(&self) -> Self {
        QSqrt2 { rat: self.rat.clone(), irr: -self.irr.clone() }
    }

    /// Field norm `a² − 2b²`, equal to `self · conjugate(self)`.
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(BigInt::from(2)) * &self.irr * &self.irr
    }

    /// Sign of `a + b√2`, decided without rounding.
    pub fn signum(&self) -> Ordering {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.irr);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // Opposite signs: compare a² against 2b².
            (sa, _) => {
                let n = sign_of(&self.norm());
                match n {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse via the conjugate; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QSqrt2 { rat: &self.rat / &n, irr: -(&self.irr / &n) })
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        let b = self.irr.to_f64().unwrap_or(f64::NAN);
        if sign_of(&self.rat) != sign_of(&self.irr) && !self.rat.is_zero() && !self.irr.is_zero() {
            // a + b√2 = norm / (a − b√2); avoids cancellation near zero.
            let n = self.norm().to_f64().unwrap_or(f64::NAN);
            n / (a - b * std::f64::consts::SQRT_2)
        } else {
            a + b * std::f64::consts::SQRT_2
        }
    }
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2 { rat: &self.rat + &rhs.rat, irr: &self.irr + &rhs.irr }
    }
}

impl<'a> Sub<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        QSqrt2 { rat: &self.rat - &rhs.rat, irr: &self.irr - &rhs.irr }
    }
}

impl<'a> Mul<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(BigInt::from(2));
        QSqrt2 {
            rat: &self.rat * &rhs.rat + two * (&self.irr * &rhs.irr),
            irr: &self.rat * &rhs.irr + &self.irr * &rhs.rat,
        }
    }
}

impl<'a> Div<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QSqrt2) -> QSqrt2 {
        let inv = rhs.recip().expect("division by zero in QSqrt2");
        self * &inv
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { rat: -self.rat, irr: -self.irr }
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -self.clone()
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident $atr:ident $am:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &'a $ty) -> $ty { (&self).$m(rhs) }
        }
        impl<'a> $atr<&'a $ty> for $ty {
            fn $am(&mut self, rhs: &'a $ty) { *self = (&*self).$m(rhs); }
        }
        impl $atr<$ty> for $ty {
            fn $am(&mut self, rhs: $ty) { *self = (&*self).$m(&rhs); }
        }
    )*};
}

forward_owned!(QSqrt2, Add add AddAssign add_assign, Sub sub SubAssign sub_assign,
    Mul mul MulAssign mul_assign, Div div DivAssign div_assign);

impl Sum for QSqrt2 {
    fn sum<I: Iterator<Item = QSqrt2>>(iter: I) -> QSqrt2 {
        iter.fold(QSqrt2::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for QSqrt2 {
    fn from(n: i64) -> Self {
        QSqrt2::from_int(n)
    }
}

impl From<BigRational> for QSqrt2 {
    fn from(r: BigRational) -> Self {
        QSqrt2::from_rational(r)
    }
}

impl fmt::Display for QSqrt2 {
    /// Canonical text form: `a`, `b*sqrt2`, `a+b*sqrt2` or `a-b*sqrt2`, with
    /// `a` and `b` printed as `p/q` (or `p` when `q = 1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if self.rat.is_zero() {
            return write!(f, "{}*sqrt2", self.irr);
        }
        if self.irr.is_negative() {
            write!(f, "{}-{}*sqrt2", self.rat, -self.irr.clone())
        } else {
            write!(f, "{}+{}*sqrt2", self.rat, self.irr)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse exact scalar {input:?}: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

fn parse_rational(s: &str, input: &str) -> Result<BigRational, ParseScalarError> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return Err(ParseScalarError { input: input.into(), reason: "empty rational" });
    }
    let r = BigRational::from_str(s)
        .map_err(|_| ParseScalarError { input: input.into(), reason: "malformed rational" })?;
    Ok(r)
}

impl FromStr for QSqrt2 {
    type Err = ParseScalarError;

    /// Accepts the canonical `Display` form and the `p/q+r/s*sqrt2` form.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseScalarError { input: input.into(), reason: "empty string" });
        }
        if !s.contains("sqrt2") {
            return Ok(QSqrt2::from_rational(parse_rational(&s, input)?));
        }
        if !s.ends_with("sqrt2") || s.matches("sqrt2").count() != 1 {
            return Err(ParseScalarError { input: input.into(), reason: "sqrt2 must end the final term" });
        }
        // The last sign not at position 0 and not following '/' starts the √2 term.
        let bytes = s.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/');
        let (rat_str, irr_str) = match split {
            Some(i) => (&s[..i], &s[i..]),
            None => ("", s.as_str()),
        };
        let coeff = irr_str.strip_suffix("sqrt2").unwrap();
        let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
        let irr = match coeff {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c, input)?,
        };
        let rat = if rat_str.is_empty() { BigRational::zero() } else { parse_rational(rat_str, input)? };
        Ok(QSqrt2 { rat, irr })
    }
}

/// Which numeric backend a value or table uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

impl FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend {other:?} (expected exact|float)")),
        }
    }
}

/// A probability, amplitude component or functional value.
///
/// Arithmetic between two exact values stays exact; any operation involving
/// a float value produces a float value.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(QSqrt2),
    Float(f64),
}

impl Scalar {
    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(QSqrt2::zero()),
            Backend::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(backend: Backend) -> Self {
        Self::from_ratio(1, 1, backend)
    }

    pub fn from_ratio(n: i64, d: i64, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(QSqrt2::from_ratio(n, d)),
            Backend::Float => Scalar::Float(n as f64 / d as f64),
        }
    }

    pub fn sqrt2(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(QSqrt2::sqrt2()),
            Backend::Float => Scalar::Float(std::f64::consts::SQRT_2),
        }
    }

    pub fn exact(q: QSqrt2) -> Self {
        Scalar::Exact(q)
    }

    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&QSqrt2> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Float(x) => *x,
        }
    }

    /// Converts to the requested backend. Float to exact is not supported and
    /// returns `None`.
    pub fn to_backend(&self, backend: Backend) -> Option<Scalar> {
        match (self, backend) {
            (Scalar::Exact(_), Backend::Exact) | (Scalar::Float(_), Backend::Float) => Some(self.clone()),
            (Scalar::Exact(q), Backend::Float) => Some(Scalar::Float(q.to_f64())),
            (Scalar::Float(_), Backend::Exact) => None,
        }
    }

    /// Exactly zero (exact backend) or `|x| ≤ eps` (float backend).
    pub fn is_zero_within(&self, eps: f64) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => x.abs() <= eps,
        }
    }

    /// Sign with a dead zone of width `eps` for float values.
    pub fn sign_within(&self, eps: f64) -> Ordering {
        match self {
            Scalar::Exact(q) => q.signum(),
            Scalar::Float(x) if x.abs() <= eps => Ordering::Equal,
            Scalar::Float(x) if *x > 0.0 => Ordering::Greater,
            Scalar::Float(_) => Ordering::Less,
        }
    }

    /// Exact equality when both sides are exact, `|a − b| ≤ eps` otherwise.
    pub fn approx_eq(&self, other: &Scalar, eps: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= eps,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// The larger of two values (exact comparison when both are exact).
    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => b.recip().map(|inv| Scalar::Exact(a * &inv)),
            _ => {
                let d = rhs.to_f64();
                if d == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(self.to_f64() / d))
                }
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! scalar_binop {
    ($($tr:ident $m:ident $atr:ident $am:ident),*) => {$(
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$m(b)),
                    _ => Scalar::Float(self.to_f64().$m(rhs.to_f64())),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl<'a> $atr<&'a Scalar> for Scalar {
            fn $am(&mut self, rhs: &'a Scalar) { *self = (&*self).$m(rhs); }
        }
        impl $atr<Scalar> for Scalar {
            fn $am(&mut self, rhs: Scalar) { *self = (&*self).$m(&rhs); }
        }
    )*};
}

scalar_binop!(Add add AddAssign add_assign, Sub sub SubAssign sub_assign,
    Mul mul MulAssign mul_assign, Div div DivAssign div_assign);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => serializer.serialize_str(&q.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse::<QSqrt2>().map(Scalar::Exact).map_err(serde::de::Error::custom),
            Repr::Number(x) => Ok(Scalar::Float(x)),
        }
    }
}

impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sign_of_near_cancellation() {
        // 99/70 is a convergent of √2: 99/70 − √2 > 0 and 140/99 − √2 < 0 with
        // differences far below f64 resolution of the parts.
        assert!(QSqrt2::from_parts(99, 70, -1, 1).is_positive());
        assert!(QSqrt2::from_parts(140, 99, -1, 1).is_negative());
        assert!(QSqrt2::from_parts(-99, 70, 1, 1).is_negative());
        assert_eq!(QSqrt2::zero().signum(), Ordering::Equal);
    }

    #[test]
    fn tsirelson_constants() {
        let two_sqrt2 = QSqrt2::from_parts(0, 1, 2, 1);
        assert!(two_sqrt2 > QSqrt2::from_int(2));
        assert!(two_sqrt2 < QSqrt2::from_int(3));
        assert_eq!(&two_sqrt2 * &two_sqrt2, QSqrt2::from_int(8));
        let cos2 = QSqrt2::from_parts(1, 2, 1, 4); // (2+√2)/4
        assert!((cos2.to_f64() - (std::f64::consts::PI / 8.0).cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn display_and_parse() {
        let cases = ["1/8", "-1/4", "3", "1/4+1/8*sqrt2", "1/4-1/8*sqrt2", "1/8*sqrt2", "-1/2*sqrt2"];
        for c in cases {
            let q: QSqrt2 = c.parse().unwrap();
            assert_eq!(q.to_string(), c);
        }
        let q: QSqrt2 = "sqrt2".parse().unwrap();
        assert_eq!(q, QSqrt2::sqrt2());
        let q: QSqrt2 = "-1/4 - sqrt2".parse().unwrap();
        assert_eq!(q, QSqrt2::from_parts(-1, 4, -1, 1));
        let q: QSqrt2 = "2/8+0/1*sqrt2".parse().unwrap();
        assert_eq!(q, QSqrt2::from_ratio(1, 4));
        assert!("abc".parse::<QSqrt2>().is_err());
        assert!("sqrt2+1".parse::<QSqrt2>().is_err());
        assert!("".parse::<QSqrt2>().is_err());
    }

    #[test]
    fn recip_and_division() {
        let x = QSqrt2::from_parts(1, 1, 1, 1); // 1 + √2
        let inv = x.recip().unwrap(); // √2 − 1
        assert_eq!(inv, QSqrt2::from_parts(-1, 1, 1, 1));
        assert!(QSqrt2::zero().recip().is_none());
    }

    #[test]
    fn scalar_mixing_promotes_to_float() {
        let a = Scalar::from_ratio(1, 4, Backend::Exact);
        let b = Scalar::Float(0.5);
        let c = &a + &b;
        assert_eq!(c.backend(), Backend::Float);
        assert!(c.approx_eq(&Scalar::Float(0.75), FLOAT_EPS));
        let d = &a * &a;
        assert_eq!(d, Scalar::from_ratio(1, 16, Backend::Exact));
    }

    #[test]
    fn scalar_serde() {
        let xs = vec![Scalar::Exact(QSqrt2::from_parts(1, 4, 1, 8)), Scalar::Float(0.25)];
        let js = serde_json::to_string(&xs).unwrap();
        assert_eq!(js, r#"["1/4+1/8*sqrt2",0.25]"#);
        let back: Vec<Scalar> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, xs);
    }

    fn arb_q() -> impl Strategy<Value = QSqrt2> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| QSqrt2::from_parts(a, b, c, d))
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_q(), y in arb_q(), z in arb_q()) {
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
            prop_assert_eq!(&(&x - &x), &QSqrt2::zero());
            if !y.is_zero() {
                prop_assert_eq!(&(&(&x / &y) * &y), &x);
            }
        }

        #[test]
        fn order_matches_float(x in arb_q(), y in arb_q()) {
            let fx = x.to_f64();
            let fy = y.to_f64();
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
            }
        }

        #[test]
        fn text_round_trip(x in arb_q()) {
            let back: QSqrt2 = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
