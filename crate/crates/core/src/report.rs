//! Output documents: verdict and classification JSON, and two-column curve CSV.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

use crate::asymptotics::{ComparisonVerdict, VariationClass};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x,value";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_curve_csv(mut w: impl Write, rows: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for &(x, v) in rows {
        writeln!(w, "{},{}", format_value(x), format_value(v))?;
    }
    w.flush()
}

pub fn read_curve_csv(r: impl BufRead) -> Result<Vec<(f64, f64)>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::schema("header", e.to_string()))?
        .ok_or_else(|| Error::schema("header", "empty file"))?;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::schema("header", format!("expected `{CSV_HEADER}`, found `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let line = line.map_err(|e| Error::schema(format!("row {row}"), e.to_string()))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let mut cell = |name: &str| -> Result<f64> {
            let raw = cells.next().ok_or_else(|| Error::schema(format!("row {row}.{name}"), "missing cell"))?;
            raw.trim().parse::<f64>().map_err(|e| Error::schema(format!("row {row}.{name}"), format!("`{raw}`: {e}")))
        };
        let (x, v) = (cell("x")?, cell("value")?);
        if cells.next().is_some() {
            return Err(Error::schema(format!("row {row}"), "expected exactly two cells"));
        }
        rows.push((x, v));
    }
    Ok(rows)
}

pub fn verdict_document(v: &ComparisonVerdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

pub fn classification_document(c: &VariationClass) -> Value {
    let mut doc = json!({
        "class": c.label.as_str(),
        "origin": c.origin.as_str(),
        "index": c.index,
    });
    if let Some(u) = c.uncertainty {
        doc["uncertainty"] = json!(u);
    }
    if let Some(e) = c.erpv {
        doc["erpv"] = json!(e);
    }
    if let Some(p) = &c.probe {
        doc["shift_probe"] = serde_json::to_value(p).expect("limits serialize");
    }
    doc
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let rows: Vec<(f64, f64)> =
            vec![(0.0, -0.0), (1e-300, 0.1 + 0.2), (std::f64::consts::PI, -7.25e12), (5.0, f64::INFINITY)];
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,value\n0.0000000000000000e0,"));
        let back = read_curve_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.0.to_bits(), b.0.to_bits());
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
    }

    #[test]
    fn csv_reader_names_bad_cells() {
        let e = read_curve_csv("x,y\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("header"));
        let e = read_curve_csv("x,value\n1,2\n3,abc\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("row 2.value"), "{e}");
        let e = read_curve_csv("x,value\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("row 1"), "{e}");
    }
}
