//! Path-tracking accessors for hand-validated JSON input.

use serde_json::Value;

use crate::rational::Q;

/// Malformed input, located by a JSON path such as `$.inputs[0].clusters`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl InputError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> InputError {
        InputError { path: path.into(), message: message.into() }
    }
}

pub fn parse(text: &str) -> Result<Value, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::new("$", format!("invalid JSON: {e}")))
}

pub fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, InputError> {
    let obj = v.as_object().ok_or_else(|| InputError::new(path, "expected an object"))?;
    obj.get(key).ok_or_else(|| InputError::new(path, format!("missing field \"{key}\"")))
}

pub fn opt_field<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.as_object().and_then(|o| o.get(key))
}

pub fn reject_unknown(v: &Value, allowed: &[&str], path: &str) -> Result<(), InputError> {
    let obj = v.as_object().ok_or_else(|| InputError::new(path, "expected an object"))?;
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(InputError::new(path, format!("unknown field \"{k}\""))),
        None => Ok(()),
    }
}

pub fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array().ok_or_else(|| InputError::new(path, "expected an array"))
}

pub fn usize_of(v: &Value, path: &str) -> Result<usize, InputError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| InputError::new(path, "expected a nonnegative integer"))
}

pub fn str_of<'a>(v: &'a Value, path: &str) -> Result<&'a str, InputError> {
    v.as_str().ok_or_else(|| InputError::new(path, "expected a string"))
}

pub fn bool_of(v: &Value, path: &str) -> Result<bool, InputError> {
    v.as_bool().ok_or_else(|| InputError::new(path, "expected a boolean"))
}

/// A rational given as a `"p/q"` string or a bare integer.
pub fn q_of(v: &Value, path: &str) -> Result<Q, InputError> {
    match v {
        Value::String(s) => s.parse().map_err(|_| InputError::new(path, format!("invalid rational {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(Q::from_int)
            .ok_or_else(|| InputError::new(path, "expected an integer or a \"p/q\" string")),
        _ => Err(InputError::new(path, "expected a rational")),
    }
}

/// Byte-stable rendering: sorted keys, no insignificant whitespace.
pub fn canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("serializing a JSON value cannot fail")
}
