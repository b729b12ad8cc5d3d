//! Reals on the wire are decimal strings with 17 significant digits, which
//! is enough for every finite `f64` to survive a round trip bit-for-bit.

use serde::{de, Deserialize, Deserializer, Serializer};

/// Formats `x` with 17 significant digits in scientific notation.
pub fn format(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses a decimal string produced by [`format`] (or any plain float literal).
pub fn parse(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let v: f64 = t.parse().map_err(|_| format!("not a decimal number: {t:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite value: {t:?}"))
    }
}

pub mod dec17 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(de::Error::custom)
    }
}

pub mod dec17_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse(s).map_err(de::Error::custom))
            .collect()
    }
}

pub mod dec17_opt {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&format(*v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|s| parse(&s).map_err(de::Error::custom)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_garbage_and_non_finite() {
        assert!(parse("abc").is_err());
        assert!(parse("inf").is_err());
        assert!(parse("NaN").is_err());
        assert_eq!(parse(" 0.5 ").unwrap(), 0.5);
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(parse(&format(x)).unwrap().to_bits(), x.to_bits());
        }
    }
}
