//! Exact rationals, rational vectors, and points of the torus ℝᵏ/ℤᵏ.
//!
//! Rationals serialize as `"p/q"` strings (or `"p"` when the denominator is 1).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Representative of `q + ℤ` in `[-1/2, 1/2)`.
pub fn centered(q: &Rational) -> Rational {
    let half = rat(1, 2);
    frac(&(q + &half)) - half
}

pub fn to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerators/denominators: shift both down before dividing.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

pub fn lcm_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|q| q.is_integer())
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg(a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| -x).collect()
}

pub fn vec_to_f64(a: &[Rational]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

pub fn zero_vec(k: usize) -> Vec<Rational> {
    vec![Rational::zero(); k]
}

pub fn euclidean_norm(a: &[Rational]) -> f64 {
    a.iter().map(|q| to_f64(q).powi(2)).sum::<f64>().sqrt()
}

/// A point of 𝕋ᵏ with exact coordinates reduced to `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TorusPoint(Vec<Rational>);

impl TorusPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        TorusPoint(coords.iter().map(frac).collect())
    }

    pub fn zero(k: usize) -> Self {
        TorusPoint(zero_vec(k))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(vec_add(&self.0, &other.0))
    }

    pub fn sub(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(vec_sub(&self.0, &other.0))
    }

    pub fn neg(&self) -> TorusPoint {
        TorusPoint::new(vec_neg(&self.0))
    }

    pub fn translate(&self, v: &[Rational]) -> TorusPoint {
        TorusPoint::new(vec_add(&self.0, v))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        vec_to_f64(&self.0)
    }

    /// Common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        lcm_denominator(&self.0)
    }

    /// Lift with every coordinate in `[-1/2, 1/2)`.
    pub fn centered_lift(&self) -> Vec<Rational> {
        self.0.iter().map(centered).collect()
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        rational_vec::deserialize(d).map(TorusPoint::new)
    }
}

/// Serde adapter for `Vec<Rational>` as an array of `"p/q"` strings.
///
/// Plain JSON integers are accepted on input.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rational).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.iter()
            .map(|value| match value {
                serde_json::Value::String(s) => parse_rational(s).map_err(de::Error::custom),
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(int)
                    .ok_or_else(|| de::Error::custom(format!("non-integer number {n}"))),
                other => Err(de::Error::custom(format!("expected rational, got {other}"))),
            })
            .collect()
    }
}

/// Serde adapter for a single rational.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        format_rational(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_reduces_negatives_into_unit_interval() {
        assert_eq!(frac(&rat(-1, 2)), rat(1, 2));
        assert_eq!(frac(&rat(7, 3)), rat(1, 3));
        assert_eq!(frac(&int(-4)), int(0));
    }

    #[test]
    fn centered_lift_is_in_half_open_interval() {
        assert_eq!(centered(&rat(3, 4)), rat(-1, 4));
        assert_eq!(centered(&rat(1, 2)), rat(-1, 2));
        assert_eq!(centered(&rat(1, 4)), rat(1, 4));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["5/4", "-1/3", "7", "0"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn torus_point_serializes_as_strings() {
        let p = TorusPoint::new(vec![rat(5, 4), rat(-1, 3)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/4","2/3"]"#);
        let back: TorusPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn to_f64_handles_huge_rationals() {
        let big = Rational::new(BigInt::one() << 3000u32, (BigInt::one() << 3001u32) + 1);
        assert!((to_f64(&big) - 0.5).abs() < 1e-12);
    }
}
