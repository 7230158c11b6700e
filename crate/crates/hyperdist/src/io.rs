//! Readers and writers for the on-disk formats: points as CSV (optional
//! header, optional trailing weight column), hyperplanes and curves as JSON
//! coefficient/vertex arrays, and sketch files as CSV with `# key=value`
//! metadata lines.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::streaming::Sketch;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidData(msg.into())
}

/// Read a point set from CSV: one point per row, comma separated, optional
/// single header row, `#` comment lines ignored. With `weighted` the last
/// column holds per-point weights.
pub fn read_points<R: Read>(reader: R, weighted: bool) -> Result<PointSet> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in csv.records().enumerate() {
        let record = record.map_err(|e| bad(format!("csv parse error: {e}")))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            // A single unparsable first row is a header; anything later is data corruption.
            Err(_) if line == 0 && rows.is_empty() => continue,
            Err(e) => return Err(bad(format!("row {}: {e}", line + 1))),
        }
    }
    if rows.is_empty() {
        return Err(bad("no data rows in points file"));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(bad("points file has rows of different lengths"));
    }
    if weighted {
        if width < 2 {
            return Err(bad("weighted points need at least one coordinate plus a weight"));
        }
        let weights: Vec<f64> = rows.iter().map(|r| r[width - 1]).collect();
        let coords: Vec<f64> = rows.iter().flat_map(|r| r[..width - 1].iter().copied()).collect();
        let m = DMatrix::from_row_slice(rows.len(), width - 1, &coords);
        PointSet::with_weights(m, weights)
    } else {
        let coords: Vec<f64> = rows.iter().flatten().copied().collect();
        PointSet::new(DMatrix::from_row_slice(rows.len(), width, &coords))
    }
}

/// Parse JSON that is either the bare payload or an object wrapping it under
/// `field` (the form emitted with a metadata block alongside).
fn json_payload<R: Read, T: serde::de::DeserializeOwned>(
    reader: R,
    field: &str,
    what: &str,
) -> Result<T> {
    let value: serde_json::Value =
        serde_json::from_reader(reader).map_err(|e| bad(format!("{what} json: {e}")))?;
    let payload = match value {
        serde_json::Value::Object(mut map) => map
            .remove(field)
            .ok_or_else(|| bad(format!("{what} json object lacks '{field}'")))?,
        other => other,
    };
    serde_json::from_value(payload).map_err(|e| bad(format!("{what} json: {e}")))
}

/// Raw hyperplane coefficients from JSON: `[u_1, ..., u_{d+1}]`, or an
/// object with a `coeffs` field. The caller canonicalizes.
pub fn read_hyperplane<R: Read>(reader: R) -> Result<Vec<f64>> {
    json_payload(reader, "coeffs", "hyperplane")
}

/// A JSON list of coefficient arrays (bare, or under `lines`).
pub fn read_hyperplanes<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    json_payload(reader, "lines", "hyperplane list")
}

/// Curve vertices from JSON: `[[x, y], ...]`, or an object with a
/// `vertices` field.
pub fn read_curve<R: Read>(reader: R) -> Result<Vec<[f64; 2]>> {
    json_payload(reader, "vertices", "curve")
}

/// A JSON list of curves (bare, or under `curves`).
pub fn read_curves<R: Read>(reader: R) -> Result<Vec<Vec<[f64; 2]>>> {
    json_payload(reader, "curves", "curve list")
}

/// Uncertain points from JSON: a list of per-point candidate location lists
/// (bare, or under `locations`).
pub fn read_uncertain<R: Read>(reader: R) -> Result<Vec<Vec<[f64; 2]>>> {
    json_payload(reader, "locations", "uncertain points")
}

/// Format with exactly 12 significant digits, plain decimal where sensible.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.11e}", x);
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Write a sketch file: `# key=value` metadata lines followed by the
/// rescaled accepted rows as CSV.
pub fn write_sketch<W: Write>(
    mut w: W,
    sketch: &Sketch,
    meta: &[(String, String)],
) -> std::io::Result<()> {
    writeln!(w, "# dim={}", sketch.dim())?;
    writeln!(w, "# eps={}", sketch.eps())?;
    writeln!(w, "# delta={}", sketch.delta())?;
    writeln!(w, "# seen={}", sketch.seen_count())?;
    writeln!(w, "# accepted={}", sketch.accepted_count())?;
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    for row in sketch.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Read back a sketch file written by [`write_sketch`]. Returns the sketch
/// and all metadata entries.
pub fn read_sketch<R: Read>(reader: R) -> Result<(Sketch, BTreeMap<String, String>)> {
    let buf = BufReader::new(reader);
    let mut meta = BTreeMap::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in buf.lines() {
        let line = line.map_err(|e| bad(format!("sketch read: {e}")))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| bad(format!("sketch row: {e}")))?);
    }
    let get = |key: &str| -> Result<&String> {
        meta.get(key).ok_or_else(|| bad(format!("sketch file missing '{key}' metadata")))
    };
    let dim: usize = get("dim")?.parse().map_err(|e| bad(format!("dim: {e}")))?;
    let eps: f64 = get("eps")?.parse().map_err(|e| bad(format!("eps: {e}")))?;
    let delta: f64 = get("delta")?.parse().map_err(|e| bad(format!("delta: {e}")))?;
    let seen: usize = get("seen")?.parse().map_err(|e| bad(format!("seen: {e}")))?;
    let sketch = Sketch::from_rows(dim, eps, delta, rows, seen)?;
    Ok((sketch, meta))
}
