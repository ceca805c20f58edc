//! Canonical JSON output.
//!
//! Objects are written with sorted keys and every float is printed with 17
//! significant digits, so identical values always produce identical bytes.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;
use crate::Result;

/// Renders `x` with 17 significant digits in exponent form.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn float_number(x: f64) -> serde_json::Number {
    format_f64(x)
        .parse()
        .expect("formatted float is a valid JSON number")
}

/// `serialize_with` adapter for float fields.
pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    float_number(*x).serialize(s)
}

/// `serialize_with` adapter for generic scalar fields.
pub fn ser_scalar<T: Scalar, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    float_number(x.to_f64_lossy()).serialize(s)
}

pub fn de_scalar<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<T, D::Error> {
    let v = f64::deserialize(d)?;
    T::from_f64(v).ok_or_else(|| serde::de::Error::custom("float out of range"))
}

/// Pretty-printed, key-sorted JSON with a trailing newline.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Single-line, key-sorted JSON (used for JSONL records).
pub fn to_canonical_line<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)?)
}
