use serde_json::Value;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` rounded to 12 significant digits.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    let a = r.abs();
    if r == 0.0 {
        "0".into()
    } else if a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

/// Rounds every non-integer number in a JSON tree to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(r) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round12(x)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Walks two JSON trees together and returns the first place where they
/// differ: a structural mismatch, or numbers further apart than
/// `tol·max(1, |a|)`.
pub fn compare_json(a: &Value, b: &Value, tol: f64, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64()?, y.as_f64()?);
            ((x - y).abs() > tol * x.abs().max(1.0)).then(|| format!("{path}: {x} vs {y}"))
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                return Some(format!("{path}: length {} vs {}", xs.len(), ys.len()));
            }
            xs.iter()
                .zip(ys)
                .enumerate()
                .find_map(|(i, (x, y))| compare_json(x, y, tol, &format!("{path}[{i}]")))
        }
        (Value::Object(xs), Value::Object(ys)) => {
            if xs.len() != ys.len() || xs.keys().any(|k| !ys.contains_key(k)) {
                return Some(format!("{path}: keys differ"));
            }
            xs.iter()
                .find_map(|(k, x)| compare_json(x, &ys[k], tol, &format!("{path}.{k}")))
        }
        _ => (a != b).then(|| format!("{path}: {a} vs {b}")),
    }
}
