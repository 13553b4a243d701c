//! Exact rational arithmetic helpers.
//!
//! Everything exact in the crate is a [`Q`]; reports serialize rationals as
//! `"p/q"` strings (or `"p"` for integers).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a plain decimal such as `"0.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, dec)) = s.split_once('.') {
        if dec.is_empty() || !dec.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(dec.len() as u32);
        let frac: BigInt = dec.parse().map_err(|_| bad())?;
        let mag = int.abs() * &scale + frac;
        let n = if neg { -mag } else { mag };
        return Ok(Q::new(n, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn min_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a <= b {
        a
    } else {
        b
    }
}

/// Serde adapters for `"p/q"` strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_q_opt {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_q(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| parse_q(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("11/4").unwrap(), frac(11, 4));
        assert_eq!(parse_q("3").unwrap(), q(3));
        assert_eq!(parse_q("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), frac(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn format_round_trip() {
        for x in [frac(11, 4), q(3), frac(-7, 9), zero()] {
            assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        }
        assert_eq!(format_q(&frac(6, 3)), "2");
    }
}
