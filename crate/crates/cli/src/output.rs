use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Float with 17 significant digits, trailing zeros trimmed (like `%.17g`).
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let s = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{}", trim_zeros(mant), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Compact JSON with floats written by [`g17`]; non-finite floats become null.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("float");
                out.push_str(&if x.is_finite() { g17(x) } else { "null".into() });
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(key.clone()));
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
        other => out.push_str(&other.to_string()),
    }
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: format!("{}\n", header.join(",")) }
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

#[derive(Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Value,
    pub inputs: Vec<InputDigest>,
    pub tool_version: String,
    pub seed: u64,
}

pub fn digest(path: &Path) -> std::io::Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    let hash = Sha256::digest(&bytes);
    Ok(InputDigest { path: path.to_path_buf(), sha256: hash.iter().map(|b| format!("{b:02x}")).collect() })
}

/// `results.csv` -> `results.csv.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-2.5e-9), "-2.5000000000000001e-9");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(1e20), "1e20");
        for x in [0.8248579173, 1.0 / 3.0, 6.02e23, -7.5e-300] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_layout() {
        let v = serde_json::json!({"a": [1, 2.5], "b": {"c": "x"}, "d": [[0.1]]});
        let s = to_json(&v);
        assert!(s.contains("\"a\": [1, 2.5]"));
        assert!(s.contains("0.10000000000000001"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"]["c"], "x");
    }

    #[test]
    fn manifest_names() {
        assert_eq!(manifest_path(Path::new("out/r.csv")), PathBuf::from("out/r.csv.manifest.json"));
    }
}
