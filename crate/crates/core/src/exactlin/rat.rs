//! Exact scalars.
//!
//! `Rat` is `num_rational::BigRational`, which keeps numerator and
//! denominator coprime with a positive denominator after every operation.
//! This module adds parsing and the `"p/q"` string form used by every
//! serialized artifact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub use num_rational::BigRational as Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as an exact rational")]
pub struct RatParseError {
    pub input: String,
}

/// `p/q` as a rational; panics on a zero denominator.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Accepts `"p"`, `"p/q"` and plain decimals such as `"-0.25"`.
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let err = || RatParseError {
        input: text.to_string(),
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole_val: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| err())?
        };
        let frac_val: BigInt = frac.parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = Rat::new(whole_val * &scale + frac_val, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let p: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rat::from_integer(p))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn fmt_rat(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Display adaptor for a slice of rationals, rendered `[a, b, c]`.
pub struct RatVec<'a>(pub &'a [Rat]);

impl fmt::Display for RatVec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rat(x))?;
        }
        write!(f, "]")
    }
}

pub fn is_integral(value: &Rat) -> bool {
    value.denom().is_one()
}

pub fn abs(value: &Rat) -> Rat {
    value.abs()
}

/// Serde helpers for a single `Rat` stored as a string.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        parse_rat(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde helpers for `Vec<Rat>` stored as an array of strings.
pub mod serde_rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&fmt_rat(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rat(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rat("6/5").unwrap(), rat(6, 5));
        assert_eq!(parse_rat("-12/8").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("7").unwrap(), int(7));
        assert_eq!(parse_rat("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rat("1.5").unwrap(), rat(3, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn canonical_form() {
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
        assert_eq!(fmt_rat(&rat(-6, 4)), "-3/2");
        assert_eq!(fmt_rat(&rat(6, 5)), "6/5");
    }
}
