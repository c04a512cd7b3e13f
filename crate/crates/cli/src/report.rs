//! Reports as `key = value` lines or as JSON, floats at 12 significant
//! digits either way.

use affthermo::fmt_g;
use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize to JSON")
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", v, &mut lines);
            let mut s = lines.join("\n");
            s.push('\n');
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&round(v)).expect("values serialize");
            s.push('\n');
            s
        }
    }
}

fn round(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            fmt_g(x).parse::<f64>().ok().and_then(Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.iter().map(round).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), round(v))).collect::<Map<_, _>>()),
        other => other.clone(),
    }
}

fn scalar(v: &Value) -> Option<String> {
    Some(match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => fmt_g(n.as_f64().unwrap()),
        },
        Value::String(s) if s.is_empty() => "\"\"".into(),
        Value::String(s) => s.clone(),
        _ => return None,
    })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => {
            for (k, child) in o {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(a) => match a.iter().map(scalar).collect::<Option<Vec<_>>>() {
            Some(items) => out.push(format!("{prefix} = [{}]", items.join(", "))),
            None => {
                for (i, child) in a.iter().enumerate() {
                    flatten(&key(&i.to_string()), child, out);
                }
            }
        },
        _ => out.push(format!("{prefix} = {}", scalar(v).unwrap())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_values_flatten_to_dotted_keys() {
        let v = json!({"a": {"b": 1.0 / 3.0, "c": [1, 2]}, "d": [{"e": true}], "f": ""});
        assert_eq!(
            render(&v, Format::Text),
            "a.b = 0.333333333333\na.c = [1, 2]\nd.0.e = true\nf = \"\"\n"
        );
        let j = render(&v, Format::Json);
        assert!(j.contains("0.333333333333") && !j.contains("0.3333333333333"));
    }
}
