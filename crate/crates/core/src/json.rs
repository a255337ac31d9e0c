//! Serialization helpers for exact output.
//!
//! Big integers are written as decimal strings; exact rationals as
//! `{"num": .., "den": ..}`. [`to_canonical_json`] routes through
//! `serde_json::Value`, whose maps are key-sorted, so parsing and re-emitting
//! a document reproduces it byte for byte.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    serde_json::to_string_pretty(&v).expect("values serialize")
}

/// Round to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn big_int_str<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn big_uint_str<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn opt_big_uint_str<S: Serializer>(n: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_none(),
    }
}

pub fn big_uint_seq<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for n in v {
        seq.serialize_element(&n.to_string())?;
    }
    seq.end()
}

/// `[[p, e], ...]` with `p` as a decimal string.
pub fn factorization<S: Serializer>(f: &[(BigUint, u32)], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(f.len()))?;
    for (p, e) in f {
        seq.serialize_element(&(p.to_string(), e))?;
    }
    seq.end()
}

fn int_value(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => v.into(),
        None => n.to_string().into(),
    }
}

pub fn rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(2))?;
    m.serialize_entry("num", &int_value(q.numer()))?;
    m.serialize_entry("den", &int_value(q.denom()))?;
    m.end()
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_serialize_exactly() {
        #[derive(Serialize)]
        struct W {
            #[serde(serialize_with = "rational")]
            q: BigRational,
        }
        let w = W {
            q: BigRational::new(2.into(), 48384.into()),
        };
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"q":{"num":1,"den":24192}}"#
        );
    }

    #[test]
    fn sig12_rounding() {
        assert_eq!(round_sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig12(0.0), 0.0);
        assert_eq!(round_sig12(-2.5e-7), -2.5e-7);
    }
}
