//! Exact rationals and their string serialization.
//!
//! Rationals serialize as `"p/q"`, or `"p"` when the denominator is one.

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigRational;

use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let whole = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || !whole.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        let n: BigInt = if digits.is_empty() { return Err(bad()) } else { digits.parse().map_err(|_| bad())? };
        let d = num::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Fall back to scaled division for very large parts.
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 60;
            let scale = num::pow(BigInt::from(2), shift.max(0) as usize);
            let n = (q.numer() / &scale).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() / &scale).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Best rational approximation-free conversion: exact binary value of a finite f64.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Serde adapter for a single rational stored as a string.
pub mod serde_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals stored as strings.
pub mod serde_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(" 7 / -14 ").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn format_round_trip() {
        for q in [rat(1, 2), int(-5), rat(-7, 3), int(0)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
        assert_eq!(format_rational(&int(4)), "4");
        assert_eq!(format_rational(&rat(-2, 6)), "-1/3");
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = Rational::new(num::pow(BigInt::from(10), 400), num::pow(BigInt::from(10), 399));
        assert!((to_f64(&big) - 10.0).abs() < 1e-12);
    }
}
