//! CSV and JSON output with fixed float formatting, plus CSV input for marginals
//! and initial states.

use crate::error::{Error, Result};
use crate::spectral::{ComplexField, Grid1D, RealField};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns of equal length rendered as `.`-decimal, `,`-separated, LF-terminated CSV.
pub fn csv_string(header: &[&str], columns: &[&[f64]]) -> Result<String> {
    if header.len() != columns.len() || columns.is_empty() {
        return Err(Error::InvalidArgument("header/column count mismatch".into()));
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidArgument("ragged columns".into()));
    }
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..n {
        for (k, c) in columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{}", format_float(c[i])).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn real_field_csv(field: &RealField, value_name: &str) -> String {
    csv_string(&["x", value_name], &[&field.grid.xs(), &field.samples]).unwrap()
}

pub fn complex_field_csv(field: &ComplexField) -> String {
    let re: Vec<f64> = field.samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = field.samples.iter().map(|z| z.im).collect();
    csv_string(&["x", "re", "im"], &[&field.grid.xs(), &re, &im]).unwrap()
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses a header line plus numeric rows into columns.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Vec<String> = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))?.split(',').map(|s| s.trim().to_string()).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(Error::Parse(format!("row {} has {} cells, expected {}", row + 2, cells.len(), header.len())));
        }
        for (c, cell) in cols.iter_mut().zip(cells) {
            c.push(cell.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", row + 2)))?);
        }
    }
    Ok((header, cols))
}

fn column<'a>(header: &[String], cols: &'a [Vec<f64>], name: &str) -> Result<&'a [f64]> {
    header.iter().position(|h| h == name).map(|i| cols[i].as_slice()).ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
}

fn grid_from_xs(xs: &[f64]) -> Result<Grid1D> {
    if xs.len() < 2 {
        return Err(Error::Parse("need at least two rows".into()));
    }
    let n = xs.len();
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if xs.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0)) {
        return Err(Error::Parse("x column is not uniformly spaced".into()));
    }
    Grid1D::new(xs[0], xs[0] + n as f64 * dx, n)
}

/// Reads `x,<value>` (the first non-x column) into a field on the implied grid.
pub fn read_real_field(text: &str) -> Result<RealField> {
    let (header, cols) = parse_csv(text)?;
    let xs = column(&header, &cols, "x")?;
    let vi = header.iter().position(|h| h != "x").ok_or_else(|| Error::Parse("no value column".into()))?;
    RealField::new(grid_from_xs(xs)?, cols[vi].clone())
}

/// Reads `x,re,im` into a complex field on the implied grid.
pub fn read_complex_field(text: &str) -> Result<ComplexField> {
    let (header, cols) = parse_csv(text)?;
    let xs = column(&header, &cols, "x")?;
    let re = column(&header, &cols, "re")?;
    let im = column(&header, &cols, "im")?;
    let samples = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
    ComplexField::new(grid_from_xs(xs)?, samples)
}

/// Files staged in memory and written together once the experiment has finished.
#[derive(Debug, Default, Clone)]
pub struct OutputSet {
    pub files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn add_json<T: Serialize + ?Sized>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        self.add(name, json_string(value)?);
        Ok(())
    }

    /// Writes every file through a temporary name followed by a rename.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            std::fs::write(&tmp, contents)?;
            std::fs::rename(&tmp, dir.join(name))?;
        }
        Ok(())
    }
}

/// File-name tag for a time value, e.g. 0.5 → "0.5", 2 → "2".
pub fn time_tag(t: f64) -> String {
    let s = format!("{t}");
    s.replace('-', "m")
}
