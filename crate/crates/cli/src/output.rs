//! JSON and file emission.

use std::fs;
use std::path::Path;

use etcsim_core::cert::OutputValue;
use etcsim_core::CertificateReport;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Rounds to twelve significant digits; non-finite values become `null`.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    json!(r)
}

fn matrix_value(m: &etcsim_core::CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| {
                        let z = m[(i, j)];
                        if z.im == 0.0 {
                            num(z.re)
                        } else {
                            json!({"re": num(z.re), "im": num(z.im)})
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

pub fn report_json(r: &CertificateReport) -> Value {
    let inputs: Map<String, Value> = r.inputs.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    let outputs: Map<String, Value> = r
        .outputs
        .iter()
        .map(|(k, v)| {
            let v = match v {
                OutputValue::Real(x) => num(*x),
                OutputValue::Matrix(m) => matrix_value(m),
                OutputValue::Text(s) => json!(s),
            };
            (k.clone(), v)
        })
        .collect();
    json!({
        "name": r.name,
        "verdict": r.verdict.name(),
        "inputs": inputs,
        "outputs": outputs,
        "notes": r.notes,
    })
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    write(path, &s)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use etcsim_core::Verdict;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(num(2.0).to_string(), "2.0");
    }

    #[test]
    fn flat_report() {
        let r = CertificateReport::new("m_min", Verdict::Certified).input("omega", 0.5).real("m_min", 1.5700123456789);
        let v = report_json(&r);
        assert_eq!(v["verdict"], "Certified");
        assert_eq!(v["outputs"]["m_min"].to_string(), "1.57001234568");
        assert!(v["notes"].as_array().unwrap().is_empty());
    }
}
