use serde_json::Value;

/// Serializes a JSON value with object keys sorted at every level and no
/// insignificant whitespace. Two logically equal values always produce the
/// same string, regardless of the key order they were written with.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

/// Parses `text` and re-serializes it canonically.
pub fn canonicalize_str(text: &str) -> Result<String, serde_json::Error> {
    let value: Value = serde_json::from_str(text)?;
    Ok(canonical_json(&value))
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            out.push('{');
            for (i, (k, v)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(v, out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(v, out);
            }
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_does_not_matter() {
        let a = canonicalize_str(r#"{"premise": "p", "hypothesis": "h", "x": {"b": 1, "a": [2, {"d": 0, "c": null}]}}"#).unwrap();
        let b = canonicalize_str(r#"{"x":{"a":[2,{"c":null,"d":0}],"b":1},"hypothesis":"h","premise":"p"}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, r#"{"hypothesis":"h","premise":"p","x":{"a":[2,{"c":null,"d":0}],"b":1}}"#);
    }

    #[test]
    fn strings_are_escaped() {
        let v = serde_json::json!({"t": "a\"b\n\u{4e2d}"});
        assert_eq!(canonical_json(&v), "{\"t\":\"a\\\"b\\n\u{4e2d}\"}");
    }
}
