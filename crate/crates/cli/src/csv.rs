//! Minimal CSV tables: one header row, rectangular rows, numbers written
//! with 16 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

pub fn num(v: f64) -> String {
    format!("{v:.15e}")
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| num(v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let path = dir.join(name);
        fs::write(&path, self.render()).map_err(io(&path))?;
        log::info!("wrote {} ({} rows)", path.display(), self.len());
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_with_twelve_digits() {
        let v = 0.123_456_789_012_345_6;
        let back: f64 = num(v).parse().unwrap();
        assert!((back - v).abs() < 1e-15);
        let mut t = CsvTable::new(&["t", "max_error"]);
        t.push_numbers(&[0.0, 1.5e-3]);
        assert_eq!(t.render(), "t,max_error\n0.000000000000000e0,1.500000000000000e-3\n");
    }

    #[test]
    #[should_panic]
    fn rejects_ragged_rows() {
        CsvTable::new(&["a", "b"]).push_numbers(&[1.0]);
    }
}
