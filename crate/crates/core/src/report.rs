//! Deterministic JSON: sorted object keys, floats with 17 significant
//! digits, two-space indentation.

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::symkernel::{format_rational, MultiPoly, Rational};

/// Renders any serializable value deterministically.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0.0".into()
    } else {
        format!("{x:.16e}")
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', k));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => out.push_str(&i.to_string()),
            (_, Some(u), _) => out.push_str(&u.to_string()),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(indent + 2, out);
                write_value(x, indent + 2, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(indent + 2, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 2, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Polynomial as a term array `[{"coeff": "p/q", "exponents": [..]}]`.
pub fn poly_terms(p: &MultiPoly<Rational>) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                serde_json::json!({
                    "coeff": format_rational(c),
                    "exponents": m.0,
                })
            })
            .collect(),
    )
}
