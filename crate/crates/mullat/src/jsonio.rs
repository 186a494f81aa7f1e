//! Small helpers for JSON encodings that must round-trip arbitrary-precision
//! integers exactly. Values that fit in an i64 are emitted as JSON numbers;
//! anything larger falls back to a decimal string. Readers accept both.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde_json::Value;

pub fn bigint_to_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(n) => Value::from(n),
        None => Value::from(x.to_string()),
    }
}

pub fn bigint_from_value(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(format!("non-integer number {n}"))
            }
        }
        Value::String(s) => s.parse::<BigInt>().map_err(|e| format!("bad integer {s:?}: {e}")),
        other => Err(format!("expected integer, got {other}")),
    }
}

/// "n" for integers, "n/d" otherwise.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => s
            .parse::<BigInt>()
            .map(BigRational::from)
            .map_err(|e| format!("bad rational {s:?}: {e}")),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().map_err(|e| format!("bad numerator: {e}"))?;
            let d = d.trim().parse::<BigInt>().map_err(|e| format!("bad denominator: {e}"))?;
            if d.is_zero() {
                return Err("zero denominator".to_string());
            }
            Ok(BigRational::new(n, d))
        }
    }
}
