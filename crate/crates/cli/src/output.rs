use serde_json::{Number, Value};

/// Rounds to 12 significant digits and maps `-0` to `0`. Non-finite values
/// become `null`.
pub fn round_float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let r = if r == 0.0 { 0.0 } else { r };
    Number::from_f64(r).map_or(Value::Null, Value::Number)
}

/// Applies [`round_float`] to every float. Object keys are already sorted
/// because `serde_json::Map` is a `BTreeMap`.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

pub fn to_json(v: Value) -> String {
    serde_json::to_string(&canonicalize(v)).expect("values serialize")
}

/// One `path = value` line per leaf; `[re, im]` pairs print as complex
/// numbers.
pub fn to_text(v: Value) -> String {
    let mut out = String::new();
    walk(&canonicalize(v), String::new(), &mut out);
    out
}

fn as_complex(v: &Value) -> Option<String> {
    let items = v.as_array()?;
    if items.len() != 2 {
        return None;
    }
    let re = items[0].as_f64()?;
    let im = items[1].as_f64()?;
    if !items[0].is_f64() && !items[1].is_f64() {
        return None;
    }
    Some(if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    })
}

fn walk(v: &Value, path: String, out: &mut String) {
    let line = |out: &mut String, text: String| {
        let key = if path.is_empty() { "." } else { path.as_str() };
        out.push_str(&format!("{key} = {text}\n"));
    };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, item) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(item, p, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            if items.iter().all(|x| as_complex(x).is_some()) {
                let parts: Vec<String> = items.iter().filter_map(as_complex).collect();
                line(out, format!("({})", parts.join(", ")));
                return;
            }
            for (k, item) in items.iter().enumerate() {
                walk(item, format!("{path}[{k}]"), out);
            }
        }
        Value::String(s) => line(out, s.clone()),
        other => line(out, other.to_string()),
    }
}
