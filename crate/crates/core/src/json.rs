//! JSON encoding of exact rationals.
//!
//! A rational is written as a pair of decimal strings `["num", "den"]`. On
//! input the string forms `"num/den"` and `"num"` are accepted too. JSON
//! numbers are rejected so that no value silently passes through a float.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Rational;

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Pair([String; 2]),
    Text(String),
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    pair_to_rational(n, d)
}

fn pair_to_rational(n: &str, d: &str) -> Result<Rational, String> {
    let num = BigInt::from_str(n).map_err(|_| format!("invalid integer {n:?}"))?;
    let den = BigInt::from_str(d).map_err(|_| format!("invalid integer {d:?}"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(num, den))
}

pub fn rational_pair(r: &Rational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

/// `num/den` text form (just `num` for integers).
pub fn rational_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn decode<E: serde::de::Error>(repr: RationalRepr) -> Result<Rational, E> {
    match repr {
        RationalRepr::Pair([n, d]) => pair_to_rational(&n, &d).map_err(E::custom),
        RationalRepr::Text(s) => parse_rational(&s).map_err(E::custom),
    }
}

/// `#[serde(with = "crate::json::rational")]`
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        rational_pair(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let repr = RationalRepr::deserialize(d).map_err(|_| {
            D::Error::custom("expected a rational as [\"num\", \"den\"] or \"num/den\"")
        })?;
        decode(repr)
    }
}

/// `#[serde(with = "crate::json::vector")]` for `Vec<Rational>`.
pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(rational_pair).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let reprs = Vec::<RationalRepr>::deserialize(d)
            .map_err(|_| D::Error::custom("expected a list of rationals"))?;
        reprs.into_iter().map(decode).collect()
    }
}

/// `#[serde(with = "crate::json::vectors")]` for `Vec<Vec<Rational>>`.
pub mod vectors {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|p| p.iter().map(rational_pair).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<Vec<Rational>>, D::Error> {
        let reprs = Vec::<Vec<RationalRepr>>::deserialize(d)
            .map_err(|_| D::Error::custom("expected a list of rational vectors"))?;
        reprs
            .into_iter()
            .map(|p| p.into_iter().map(decode).collect())
            .collect()
    }
}

/// `#[serde(with = "crate::json::opt_rational")]` for `Option<Rational>`.
pub mod opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(rational_pair).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let repr = Option::<RationalRepr>::deserialize(d)
            .map_err(|_| D::Error::custom("expected a rational or null"))?;
        repr.map(decode).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::rat;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap {
        #[serde(with = "rational")]
        r: Rational,
    }

    #[test]
    fn accepts_pair_and_text() {
        let a: Wrap = serde_json::from_str(r#"{"r": ["6", "-8"]}"#).unwrap();
        assert_eq!(a.r, rat(-3, 4));
        let b: Wrap = serde_json::from_str(r#"{"r": "-3/4"}"#).unwrap();
        assert_eq!(b.r, rat(-3, 4));
        let c: Wrap = serde_json::from_str(r#"{"r": "7"}"#).unwrap();
        assert_eq!(c.r, rat(7, 1));
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            r#"{"r":["-3","4"]}"#
        );
    }

    #[test]
    fn rejects_numbers_and_zero_denominators() {
        assert!(serde_json::from_str::<Wrap>(r#"{"r": 0.5}"#).is_err());
        assert!(serde_json::from_str::<Wrap>(r#"{"r": ["1", "0"]}"#).is_err());
        assert!(serde_json::from_str::<Wrap>(r#"{"r": "x/2"}"#).is_err());
    }
}
