//! The coefficient field `K = Q(√q)`.
//!
//! A scalar is `a + b·s` with `a, b` exact rationals and `s² = q`. When `q`
//! is a perfect square the canonical form substitutes the positive rational
//! root and keeps `b = 0`, so equality is plain structural equality.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A half-integer `k/2`, stored as the numerator `k`.
///
/// Exponents of `q` in normalized tables live in `(1/2)·Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    /// `k` such that the value is `k/2`.
    pub fn halves(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The integer value; panics on a strict half-integer.
    pub fn whole(self) -> i64 {
        assert!(self.is_integer(), "half-integer {} is not whole", self);
        self.0 / 2
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(num) = s.strip_suffix("/2") {
            let k: i64 = num.trim().parse().map_err(|e| format!("{e}"))?;
            Ok(HalfInt(k))
        } else {
            let n: i64 = s.trim().parse().map_err(|e| format!("{e}"))?;
            Ok(HalfInt::from_int(n))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// An element `a + b·s` of `K = Q(√q)`, with `s² = q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub a: BigRational,
    pub b: BigRational,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> Self {
        ExactScalar { a: BigRational::one(), b: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar { a: BigRational::from_integer(BigInt::from(n)), b: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactScalar {
            a: BigRational::new(BigInt::from(num), BigInt::from(den)),
            b: BigRational::zero(),
        }
    }

    pub fn from_rational(a: BigRational) -> Self {
        ExactScalar { a, b: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True when the scalar lies in `Q` (no `s` part after canonicalization).
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

impl std::ops::Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl std::ops::Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl std::ops::Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -&self.a, b: -&self.b }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let s_part = if self.b.is_one() {
            "s".to_string()
        } else if (-&self.b).is_one() {
            "-s".to_string()
        } else {
            format!("{}*s", self.b)
        };
        if self.a.is_zero() {
            write!(f, "{}", s_part)
        } else if self.b.is_negative() {
            write!(f, "{}{}", self.a, s_part)
        } else {
            write!(f, "{}+{}", self.a, s_part)
        }
    }
}

fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_from_string(s: &str) -> std::result::Result<BigRational, String> {
    let mut parts = s.splitn(2, '/');
    let numer = parts.next().unwrap_or("").trim();
    let n: BigInt = numer.parse().map_err(|e| format!("bad numerator {numer:?}: {e}"))?;
    match parts.next() {
        None => Ok(BigRational::from_integer(n)),
        Some(denom) => {
            let d: BigInt =
                denom.trim().parse().map_err(|e| format!("bad denominator {denom:?}: {e}"))?;
            if d.is_zero() {
                return Err("zero denominator".to_string());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    a: String,
    b: String,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr { a: rational_to_string(&self.a), b: rational_to_string(&self.b) }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(de)?;
        Ok(ExactScalar {
            a: rational_from_string(&repr.a).map_err(D::Error::custom)?,
            b: rational_from_string(&repr.b).map_err(D::Error::custom)?,
        })
    }
}

/// The fixed choice of `q` and the semantics of `s = √q`.
///
/// All multiplicative structure on [`ExactScalar`] goes through the context;
/// addition is context-free. Values are immutable and the context is `Copy`
/// apart from the cached rational root, so everything is thread-safe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    q: u64,
    /// Set when `q` is a perfect square, in which case `s` collapses to the
    /// positive integer root.
    sqrt_q: Option<u64>,
}

fn integer_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    for cand in r.saturating_sub(2)..=r + 2 {
        if cand.checked_mul(cand) == Some(n) {
            return Some(cand);
        }
    }
    None
}

fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 0;
    let mut m = n;
    for cand in 2..=n {
        if cand * cand > n {
            break;
        }
        if m % cand == 0 {
            p = cand;
            break;
        }
    }
    if p == 0 {
        return true; // n itself is prime
    }
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

impl FieldCtx {
    /// Fixes `q` (a prime power ≥ 2) and the choice of `√q`.
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::QTooSmall(q));
        }
        if !is_prime_power(q) {
            return Err(Error::NotPrimePower(q));
        }
        Ok(FieldCtx { q, sqrt_q: integer_sqrt(q) })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn q_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.q))
    }

    /// Whether `s = √q` collapses to a rational.
    pub fn s_is_rational(&self) -> bool {
        self.sqrt_q.is_some()
    }

    /// Canonical form: substitute the rational root for `s` when it exists.
    pub fn canon(&self, x: ExactScalar) -> ExactScalar {
        match self.sqrt_q {
            Some(r) if !x.b.is_zero() => ExactScalar {
                a: x.a + &x.b * BigRational::from_integer(BigInt::from(r)),
                b: BigRational::zero(),
            },
            _ => x,
        }
    }

    pub fn add(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        x + y
    }

    pub fn sub(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        x - y
    }

    pub fn neg(&self, x: &ExactScalar) -> ExactScalar {
        -x
    }

    pub fn mul(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        let q = self.q_rational();
        self.canon(ExactScalar {
            a: &x.a * &y.a + &x.b * &y.b * q,
            b: &x.a * &y.b + &x.b * &y.a,
        })
    }

    /// `(a + b·s)⁻¹ = (a − b·s) / (a² − b²·q)`.
    pub fn inv(&self, x: &ExactScalar) -> Result<ExactScalar> {
        let x = self.canon(x.clone());
        if x.is_zero() {
            return Err(Error::ScalarDivisionByZero);
        }
        let q = self.q_rational();
        let d = &x.a * &x.a - &x.b * &x.b * q;
        // d = 0 with x ≠ 0 would force √q rational, which canon removed.
        debug_assert!(!d.is_zero());
        Ok(ExactScalar { a: &x.a / &d, b: -&x.b / &d })
    }

    pub fn div(&self, x: &ExactScalar, y: &ExactScalar) -> Result<ExactScalar> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// `q^e` for a half-integer exponent, as an exact scalar.
    pub fn q_power(&self, e: HalfInt) -> ExactScalar {
        let k = e.halves();
        let whole = k.div_euclid(2);
        let rem = k.rem_euclid(2);
        let q = self.q_rational();
        let base = if whole >= 0 {
            num::pow::pow(q.clone(), whole as usize)
        } else {
            num::pow::pow(q.clone().recip(), (-whole) as usize)
        };
        if rem == 0 {
            ExactScalar::from_rational(base)
        } else {
            // q^{whole}·s with s = q^{1/2}
            self.canon(ExactScalar { a: BigRational::zero(), b: base })
        }
    }

    /// The value of `s` itself, `q^{1/2}`.
    pub fn sqrt_q(&self) -> ExactScalar {
        self.q_power(HalfInt(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_validates_prime_powers() {
        assert!(FieldCtx::new(2).is_ok());
        assert!(FieldCtx::new(3).is_ok());
        assert!(FieldCtx::new(4).unwrap().s_is_rational());
        assert!(FieldCtx::new(8).is_ok());
        assert!(FieldCtx::new(9).unwrap().s_is_rational());
        assert!(FieldCtx::new(27).is_ok());
        assert!(!FieldCtx::new(2).unwrap().s_is_rational());
        assert!(matches!(FieldCtx::new(6), Err(Error::NotPrimePower(6))));
        assert!(matches!(FieldCtx::new(12), Err(Error::NotPrimePower(12))));
        assert!(matches!(FieldCtx::new(1), Err(Error::QTooSmall(1))));
        assert!(matches!(FieldCtx::new(0), Err(Error::QTooSmall(0))));
    }

    #[test]
    fn s_squares_to_q() {
        let ctx = FieldCtx::new(2).unwrap();
        let s = ctx.sqrt_q();
        assert_eq!(ctx.mul(&s, &s), ExactScalar::from_int(2));
    }

    #[test]
    fn inverse_of_s() {
        let ctx = FieldCtx::new(2).unwrap();
        let s = ctx.sqrt_q();
        let inv = ctx.inv(&s).unwrap();
        // s⁻¹ = (1/2)·s, since s·(s/2) = q/2 = 1 for q = 2
        assert_eq!(inv, ExactScalar { a: BigRational::zero(), b: BigRational::new(1.into(), 2.into()) });
        assert!(ctx.mul(&s, &inv).is_one());
    }

    #[test]
    fn additive_inverse() {
        let one = ExactScalar::one();
        assert!((&one + &-&one).is_zero());
    }

    #[test]
    fn inversion_of_zero_fails() {
        let ctx = FieldCtx::new(3).unwrap();
        assert!(ctx.inv(&ExactScalar::zero()).is_err());
    }

    #[test]
    fn q_power_examples() {
        let ctx3 = FieldCtx::new(3).unwrap();
        assert_eq!(ctx3.q_power(HalfInt::from_int(1)), ExactScalar::from_int(3));
        assert_eq!(
            ctx3.q_power(HalfInt(1)),
            ExactScalar { a: BigRational::zero(), b: BigRational::one() }
        );
        let ctx4 = FieldCtx::new(4).unwrap();
        assert_eq!(ctx4.q_power(HalfInt(-1)), ExactScalar::from_ratio(1, 2));
        assert_eq!(ctx4.q_power(HalfInt(1)), ExactScalar::from_int(2));
    }

    #[test]
    fn q_power_is_multiplicative() {
        for q in [2u64, 3, 4, 9] {
            let ctx = FieldCtx::new(q).unwrap();
            for k1 in -12..=12i64 {
                for k2 in -12..=12i64 {
                    let lhs = ctx.mul(&ctx.q_power(HalfInt(k1)), &ctx.q_power(HalfInt(k2)));
                    assert_eq!(lhs, ctx.q_power(HalfInt(k1 + k2)), "q={q} k1={k1} k2={k2}");
                }
            }
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let ctx = FieldCtx::new(4).unwrap();
        let x = ExactScalar { a: BigRational::one(), b: BigRational::new(3.into(), 2.into()) };
        let once = ctx.canon(x.clone());
        assert_eq!(ctx.canon(once.clone()), once);
        assert_eq!(once, ExactScalar::from_int(4)); // 1 + (3/2)·2
    }

    #[test]
    fn scalar_json_round_trip() {
        let x = ExactScalar { a: BigRational::new(3.into(), 2.into()), b: BigRational::new((-1).into(), 7.into()) };
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"a":"3/2","b":"-1/7"}"#);
        let back: ExactScalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn half_int_display_and_parse() {
        assert_eq!(HalfInt(3).to_string(), "3/2");
        assert_eq!(HalfInt::from_int(-2).to_string(), "-2");
        assert_eq!("-1/2".parse::<HalfInt>().unwrap(), HalfInt(-1));
        assert_eq!("5".parse::<HalfInt>().unwrap(), HalfInt::from_int(5));
    }
}
