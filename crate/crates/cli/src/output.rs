//! Deterministic text output: 12 significant digits and a version header.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

pub const VERSION_LINE: &str = concat!("# normproj ", env!("CARGO_PKG_VERSION"));
pub const VERSION_TAG: &str = concat!("normproj ", env!("CARGO_PKG_VERSION"));

/// `x` with 12 significant digits, trailing zeros removed, in the style
/// of `%.12g`.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let e = format!("{x:.11e}");
    let (mant, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r: f64 = sig(x).parse().unwrap_or(x);
            serde_json::Number::from_f64(r)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with rounded floats and a `version` field on objects.
pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut v = round_json(serde_json::to_value(value)?);
    if let Value::Object(o) = &mut v {
        o.insert("version".into(), Value::String(VERSION_TAG.into()));
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// CSV text with the version header, a column header and formatted rows.
pub fn csv_text(extra_header: Option<&str>, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = String::new();
    s.push_str(VERSION_LINE);
    s.push('\n');
    if let Some(h) = extra_header {
        s.push_str("# ");
        s.push_str(h);
        s.push('\n');
    }
    s.push_str(&columns.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}
