use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hshear::geometry::BoundaryCurve;
use hshear::C64;
use serde::Serialize;
use serde_json::Value;

pub const DEFAULT_PRECISION: usize = 12;
pub const MIN_PRECISION: usize = 6;
pub const OUT_DIR_ENV: &str = "HSHEAR_OUT_DIR";

pub const CURVE_COLUMNS: [&str; 5] = ["theta", "re", "im", "turning_increment", "intra_backturn"];
pub const SHEAR_COLUMNS: [&str; 9] = ["theta", "re_z", "im_z", "re_f", "im_f", "re_h", "im_h", "re_g", "im_g"];

pub fn check_precision(digits: usize) -> Result<usize> {
    if digits < MIN_PRECISION {
        bail!("precision must be at least {MIN_PRECISION} significant digits, got {digits}");
    }
    Ok(digits)
}

/// x rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

pub fn fmt_num(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x, digits))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_value(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_value(x, digits)),
        _ => {}
    }
}

/// `value` as a JSON tree with every float rounded to `digits` significant digits.
pub fn rounded_json<T: Serialize>(value: &T, digits: usize) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v, digits);
    Ok(v)
}

pub fn to_json<T: Serialize>(value: &T, digits: usize) -> Result<String> {
    Ok(serde_json::to_string_pretty(&rounded_json(value, digits)?)?)
}

/// Relative paths land in `out_dir` when one is given.
pub fn resolve(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

pub fn write_file(path: &Path, out_dir: Option<&Path>, contents: &str) -> Result<PathBuf> {
    let target = resolve(path, out_dir);
    if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(&target, contents).with_context(|| format!("writing {}", target.display()))?;
    Ok(target)
}

pub fn write_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>, digits: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_num(*x, digits)))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Header and numeric rows of a CSV table.
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().with_context(|| format!("not a number: `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn curve_csv(curve: &BoundaryCurve, digits: usize) -> Result<String> {
    let rows = (0..curve.n()).map(|j| {
        vec![
            curve.theta[j],
            curve.gamma[j].re,
            curve.gamma[j].im,
            curve.turning[j],
            curve.intra_backturn[j],
        ]
    });
    write_table(&CURVE_COLUMNS, rows, digits)
}

/// Re-reads a curve written by [`curve_csv`].
pub fn read_curve_csv(text: &str, r: f64) -> Result<BoundaryCurve> {
    let (header, rows) = read_table(text)?;
    if header != CURVE_COLUMNS {
        bail!("expected columns {}, got {}", CURVE_COLUMNS.join(","), header.join(","));
    }
    let col = |k: usize| rows.iter().map(|row| row[k]).collect::<Vec<_>>();
    let gamma = rows.iter().map(|row| C64::new(row[1], row[2])).collect();
    Ok(BoundaryCurve::from_samples(r, col(0), gamma, col(3), col(4))?)
}
