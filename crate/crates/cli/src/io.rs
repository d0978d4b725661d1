//! File formats.
//!
//! Point sets are CSV (`d,N` header, then `N` rows of `d+1` coordinates in
//! `{:.16e}`, i.e. 17 significant digits) or JSON (the serialized
//! [`PointSet`], meta included); the format follows the file extension.
//! Reports, bounds and partition summaries are JSON; descent traces and
//! sign matrices are CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use tessel_core::energy::TraceRow;
use tessel_core::{BitVector, Point, PointSet};

use crate::error::{CliError, CliResult};

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn point_set_to_csv(z: &PointSet) -> String {
    let mut out = format!("{},{}\n", z.d, z.len());
    for p in z.iter() {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn bad(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses the CSV point-set format; `path` only labels errors.
pub fn parse_point_set_csv(text: &str, path: &Path) -> CliResult<PointSet> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hl, header) = lines.next().ok_or_else(|| bad(path, 1, "empty file, expected header `d,N`"))?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let parse_count = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| bad(path, hl, format!("header `{header}`: {what} must be a nonnegative integer")))
    };
    if fields.len() != 2 {
        return Err(bad(path, hl, format!("header `{header}` must be `d,N`")));
    }
    let d = parse_count(fields[0], "d")?;
    let n = parse_count(fields[1], "N")?;
    if d < 1 || n < 1 {
        return Err(bad(path, hl, "header needs d >= 1 and N >= 1"));
    }
    let mut points = Vec::with_capacity(n);
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        if points.len() == n {
            return Err(bad(path, ln, format!("more than the {n} rows announced in the header")));
        }
        let coords = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| bad(path, ln, format!("bad number: {e}")))?;
        if coords.len() != d + 1 {
            return Err(bad(path, ln, format!("expected {} coordinates, found {}", d + 1, coords.len())));
        }
        points.push(Point::new(coords).map_err(|e| bad(path, ln, e.to_string()))?);
    }
    if points.len() != n {
        return Err(bad(
            path,
            text.lines().count().max(1),
            format!("expected {n} rows, found {}", points.len()),
        ));
    }
    Ok(PointSet::from_points(points)?)
}

pub fn read_point_set(path: &Path) -> CliResult<PointSet> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if is_json(path) {
        let z: PointSet = serde_json::from_str(&text).map_err(|e| bad(path, e.line(), e.to_string()))?;
        // re-validate: the JSON may carry off-sphere or mixed-dimension points
        let points = z
            .points
            .into_iter()
            .map(|p| Point::new(p.into_coords()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(path, 0, e.to_string()))?;
        let checked = PointSet::new(points, z.meta)?;
        if checked.d != z.d {
            return Err(bad(path, 0, format!("`d` is {} but points live on S^{}", z.d, checked.d)));
        }
        return Ok(checked);
    }
    parse_point_set_csv(&text, path)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_point_set(path: &Path, z: &PointSet) -> CliResult<()> {
    let text = if is_json(path) { to_json(z) } else { point_set_to_csv(z) };
    write_text(path, &text)
}

pub fn trace_to_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("step,energy,grad_norm,step_size\n");
    for r in trace {
        let _ = writeln!(out, "{},{:.16e},{:.16e},{:.16e}", r.step, r.energy, r.grad_norm, r.step_size);
    }
    out
}

/// One row of `+1`/`-1` entries per embedded point.
pub fn bits_to_csv(rows: &[BitVector]) -> String {
    let mut out = String::new();
    for b in rows {
        let row: Vec<&str> = b.signs().iter().map(|&s| if s > 0 { "1" } else { "-1" }).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
