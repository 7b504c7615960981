use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Significant digits kept for every float in command output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Serializes `value` with all floats rounded to [`SIGNIFICANT_DIGITS`].
pub fn to_value(value: &impl Serialize) -> CliResult<Value> {
    let mut v = serde_json::to_value(value)
        .map_err(|e| CliError::Data(format!("cannot serialize output: {e}")))?;
    round_floats(&mut v);
    Ok(v)
}

pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("is_f64");
            *v = Value::from(round_significant(x));
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value always serializes");
    s.push('\n');
    s
}

pub fn print(v: &Value) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(render(v).as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
}

pub fn write(path: &Path, v: &Value) -> CliResult<()> {
    fs::write(path, render(v))
        .map_err(|e| CliError::Data(format!("{}: cannot write report: {e}", path.display())))
}
