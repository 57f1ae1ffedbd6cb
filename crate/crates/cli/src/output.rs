use serde::Serialize;
use serde_json::Value;

use crate::settings::Fail;

pub fn json<T: Serialize>(value: &T) -> Result<String, Fail> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Fail::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// RFC 4180 CSV with a header row.
pub fn csv<I, R>(header: &[&str], rows: I) -> Result<String, Fail>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let err = |e: csv::Error| Fail::internal(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Fail::internal(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Space-aligned columns.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

/// Non-finite floats become strings; JSON has no infinity.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("nan")
    }
}
