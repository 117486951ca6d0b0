//! Deterministic CSV, JSON and SVG writers.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

/// Report schema version written as the top-level `"schema"` field.
pub const SCHEMA: u32 = 1;

/// 17 significant digits, locale independent.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

/// Serialises `value` (an object) with `"schema": 1` added.
pub fn to_json<T: Serialize>(value: &T) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), Value::from(SCHEMA));
    match serde_json::to_value(value).expect("report types serialise") {
        Value::Object(m) => map.extend(m),
        other => {
            map.insert("data".into(), other);
        }
    }
    Value::Object(map)
}

pub fn write_json(path: Option<&Path>, value: &Value) -> io::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

/// A single polyline with an autoscaled `viewBox`.
pub fn svg_polyline(points: &[(f64, f64)]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let (vx, vy, vw, vh) = (x0 - pad, -(y1 + pad), x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let stroke = vw.max(vh) / 400.0;
    let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.6e},{:.6e}", x, -y)).collect();
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{:.6e} {:.6e} {:.6e} {:.6e}\" width=\"600\" height=\"600\">\n\
         <polyline fill=\"none\" stroke=\"black\" stroke-width=\"{:.3e}\" points=\"{}\"/>\n\
         </svg>\n",
        vx,
        vy,
        vw,
        vh,
        stroke,
        pts.join(" ")
    )
}

pub fn write_text(path: Option<&Path>, text: &str) -> io::Result<()> {
    let mut w = sink(path)?;
    w.write_all(text.as_bytes())
}
