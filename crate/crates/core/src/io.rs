//! JSON encodings.
//!
//! Integers are JSON numbers when `|n| ≤ 2⁵³` and decimal strings otherwise;
//! both forms are accepted on input.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::involutions::InvolutiveLattice;
use crate::lattice::{standard_lattice, Lattice};
use crate::linalg::IntMatrix;

const SAFE: i64 = 1 << 53;

pub fn int_to_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) if (-SAFE..=SAFE).contains(&v) => json!(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("{n} is not an integer"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{s}` is not an integer"))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(int_from_json)
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(IntMatrix::zeros(0, 0));
    }
    IntMatrix::from_big_rows(rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn vector_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn lattice_to_json(l: &Lattice) -> Value {
    let mut obj = json!({ "gram": matrix_to_json(l.gram()) });
    if let Some(label) = l.label() {
        obj["label"] = json!(label);
    }
    obj
}

fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// `{"gram": [[...]], "label": "..."}` or `{"name": "E8(-2)"}`.
pub fn lattice_from_value(v: &Value) -> Result<Lattice> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("lattice must be a JSON object".into()))?;
    if let Some(name) = obj.get("name") {
        let name = name
            .as_str()
            .ok_or_else(|| Error::Parse("`name` must be a string".into()))?;
        return standard_lattice(name);
    }
    let gram = obj
        .get("gram")
        .ok_or_else(|| Error::Parse("lattice object needs `gram` or `name`".into()))?;
    let l = Lattice::new(matrix_from_json(gram)?)?;
    Ok(match obj.get("label").and_then(Value::as_str) {
        Some(label) => l.with_label(label),
        None => l,
    })
}

pub fn lattice_from_json(text: &str) -> Result<Lattice> {
    lattice_from_value(&parse(text)?)
}

/// `{"gram": [[...]], "action": [[...]]}`.
pub fn involution_from_json(text: &str) -> Result<InvolutiveLattice> {
    let v = parse(text)?;
    let lattice = lattice_from_value(&v)?;
    let action = v
        .get("action")
        .ok_or_else(|| Error::Parse("involution object needs `action`".into()))?;
    InvolutiveLattice::new(lattice, matrix_from_json(action)?)
}

pub fn involution_to_json(il: &InvolutiveLattice) -> Value {
    let mut obj = lattice_to_json(il.lattice());
    obj["action"] = matrix_to_json(il.action());
    obj
}
