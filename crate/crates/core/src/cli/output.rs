//! Number formatting and atomic file output.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{Number, Value};

use super::CliError;

/// 17 significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number carrying the same 17-digit text as [`fmt_num`]; `null` when not finite.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_string_unchecked(fmt_num(x)))
    } else {
        Value::Null
    }
}

pub fn json_nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_num(x)).collect())
}

/// `[re, im]`.
pub fn json_complex(z: Complex64) -> Value {
    Value::Array(vec![json_num(z.re), json_num(z.im)])
}

pub fn json_complexes(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| json_complex(z)).collect())
}

/// A JSON object holding the given values as is, number text included.
pub fn object<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn to_json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    text
}

/// Writes through a temporary file in the target directory, then renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Sends `contents` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}
