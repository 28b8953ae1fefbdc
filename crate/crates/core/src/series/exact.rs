//! Exactly stored parameters. Real parameters are rationals so that values
//! like 17/36 stay exact at any working precision.

use std::fmt;

use rug::{Complex, Float, Integer, Rational};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn int(v: i64) -> Self {
        Exact(Rational::from(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exact(Rational::from((num, den)))
    }

    /// Parses "17/36", "-2", "0.125" or "1e-3".
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: Integer = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {t:?}")))?;
            let d: Integer = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {t:?}")))?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {t:?}")));
            }
            return Ok(Exact(Rational::from((n, d))));
        }
        parse_decimal(t).map(Exact)
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite parameter {v}")));
        }
        // shortest round-trip decimal, so 0.1 means one tenth
        parse_decimal(&format!("{v:e}")).map(Exact)
    }

    pub fn to_float(&self, bits: u32) -> Float {
        Float::with_val(bits, &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    pub fn is_positive(&self) -> bool {
        self.0 > 0
    }
}

fn parse_decimal(t: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad number {t:?}"));
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut q = Rational::from(digits.parse::<Integer>().map_err(|_| bad())?);
    let shift = exp - frac_part.len() as i32;
    if shift >= 0 {
        q *= Rational::from(Integer::from(Integer::u_pow_u(10, shift as u32)));
    } else {
        q /= Rational::from(Integer::from(Integer::u_pow_u(10, (-shift) as u32)));
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct ExactVisitor;

impl Visitor<'_> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a string like \"17/36\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exact, E> {
        Exact::parse(v).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exact, E> {
        Exact::from_f64(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exact, E> {
        Ok(Exact::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exact, E> {
        Ok(Exact(Rational::from(v)))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExactVisitor)
    }
}

/// Complex parameter; serialized as `[re, im]`, a bare real is accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactComplex {
    pub re: Exact,
    pub im: Exact,
}

impl ExactComplex {
    pub fn new(re: Exact, im: Exact) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: Exact) -> Self {
        ExactComplex {
            re,
            im: Exact::int(0),
        }
    }

    pub fn int(v: i64) -> Self {
        Self::real(Exact::int(v))
    }

    pub fn to_complex(&self, bits: u32) -> Complex {
        Complex::with_val(bits, (&self.re.0, &self.im.0))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(
                f,
                "{}{}{}i",
                self.re,
                if self.im.0 < 0 { "" } else { "+" },
                self.im
            )
        }
    }
}

impl Serialize for ExactComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.re)?;
        seq.serialize_element(&self.im)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ExactComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Pair(Exact, Exact),
            Real(Exact),
        }
        Ok(match Form::deserialize(d)? {
            Form::Pair(re, im) => ExactComplex { re, im },
            Form::Real(re) => ExactComplex::real(re),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(Exact::parse("17/36").unwrap(), Exact::ratio(17, 36));
        assert_eq!(Exact::parse("0.125").unwrap(), Exact::ratio(1, 8));
        assert_eq!(Exact::parse("-1.5e1").unwrap(), Exact::int(-15));
        assert_eq!(Exact::parse("2e-2").unwrap(), Exact::ratio(1, 50));
        assert_eq!(Exact::from_f64(0.1).unwrap(), Exact::ratio(1, 10));
        assert!(Exact::parse("1/0").is_err());
        assert!(Exact::parse("abc").is_err());
        assert!(Exact::parse("").is_err());
    }

    #[test]
    fn json_round_trip() {
        let z: ExactComplex = serde_json::from_str("[-0.5, \"-2\"]").unwrap();
        assert_eq!(z, ExactComplex::new(Exact::ratio(-1, 2), Exact::int(-2)));
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, "[\"-1/2\",\"-2\"]");
        let back: ExactComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        let r: ExactComplex = serde_json::from_str("3").unwrap();
        assert_eq!(r, ExactComplex::int(3));
    }
}
