//! CSV diagnostics and snapshot files.
//!
//! diagnostics.csv has the fixed column set below, values printed in
//! shortest round-trip decimal form so reruns of one config are
//! byte-identical and nothing is lost on re-parse.
//!
//! Snapshots are one header line `dim n... h... t=<time>` followed by one
//! value per line in linear index order (x fastest, then y, then z).

use chemotaxis_core::diagnostics::DiagnosticsRow;
use chemotaxis_core::grid::{Field, Grid};

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const CSV_HEADER: &str =
    "t,mass_u,min_u,max_u,min_v,max_v,energy,grad_z_l2sq,grad_z_l4,consumption_diss,g_mass,v_lower_bound_ref";

pub struct CsvWriter {
    inner: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path) -> std::io::Result<Self> {
        let mut inner = BufWriter::new(File::create(path)?);
        writeln!(inner, "{CSV_HEADER}")?;
        Ok(CsvWriter { inner })
    }

    pub fn write_row(&mut self, r: &DiagnosticsRow<f64>) -> std::io::Result<()> {
        writeln!(
            self.inner,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.mass_u,
            r.min_u,
            r.max_u,
            r.min_v,
            r.max_v,
            r.energy,
            r.grad_z_l2sq,
            r.grad_z_l4,
            r.consumption_diss,
            r.g_mass,
            r.v_lower_bound_ref
        )
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

pub fn write_snapshot(path: &Path, field: &Field<f64>, t: f64) -> std::io::Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "{}", grid.dim())?;
    for d in 0..grid.dim() {
        write!(w, " {}", grid.n(d))?;
    }
    for d in 0..grid.dim() {
        write!(w, " {}", grid.h(d))?;
    }
    writeln!(w, " t={t}")?;
    for v in field.values() {
        writeln!(w, "{v}")?;
    }
    w.flush()
}

/// Read a snapshot written by `write_snapshot` onto a matching grid.
/// The cell counts must match exactly and the spacings to within 1e-12
/// relative.
pub fn read_snapshot(path: impl AsRef<Path>, grid: &Grid<f64>) -> Result<(Field<f64>, f64), String> {
    let file = File::open(path.as_ref()).map_err(|e| e.to_string())?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or("empty snapshot file")?
        .map_err(|e| e.to_string())?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.is_empty() {
        return Err("empty snapshot header".into());
    }
    let dim: usize = tokens[0].parse().map_err(|_| "bad dim in snapshot header")?;
    if dim != grid.dim() {
        return Err(format!("snapshot dim {dim} does not match grid dim {}", grid.dim()));
    }
    if tokens.len() != 1 + 2 * dim + 1 {
        return Err("malformed snapshot header".into());
    }
    for d in 0..dim {
        let n: usize = tokens[1 + d].parse().map_err(|_| "bad n in snapshot header")?;
        if n != grid.n(d) {
            return Err(format!("snapshot n[{d}] = {n} does not match grid n = {}", grid.n(d)));
        }
        let h: f64 = tokens[1 + dim + d].parse().map_err(|_| "bad h in snapshot header")?;
        if (h - grid.h(d)).abs() > 1e-12 * grid.h(d) {
            return Err(format!("snapshot h[{d}] = {h} does not match grid h = {}", grid.h(d)));
        }
    }
    let t: f64 = tokens[1 + 2 * dim]
        .strip_prefix("t=")
        .ok_or("snapshot header missing t=")?
        .parse()
        .map_err(|_| "bad time in snapshot header")?;

    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line.map_err(|e| e.to_string())?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        values.push(trimmed.parse::<f64>().map_err(|_| format!("bad value `{trimmed}`"))?);
    }
    if values.len() != grid.len() {
        return Err(format!("snapshot has {} values, grid needs {}", values.len(), grid.len()));
    }
    let field = Field::from_values(grid, values).map_err(|e| e.to_string())?;
    Ok((field, t))
}
