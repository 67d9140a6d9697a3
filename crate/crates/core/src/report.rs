//! Plain CSV tables with a fixed column order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn extend(&mut self, other: CsvTable) {
        assert_eq!(self.header, other.header, "cannot merge tables with different columns");
        self.rows.extend(other.rows);
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, fields: &[String]| {
            let joined: Vec<String> = fields.iter().map(|f| escape(f)).collect();
            let _ = writeln!(out, "{}", joined.join(","));
        };
        line(&mut out, &self.header);
        for r in &self.rows {
            line(&mut out, r);
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Shortest round-trip scientific notation, e.g. `2.5e-1`.
pub fn sci(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = CsvTable::new(["a", "b"]);
        assert_eq!(t.to_csv_string(), "a,b\n");
    }

    #[test]
    fn quotes_fields_with_commas() {
        let mut t = CsvTable::new(["cfg", "v"]);
        t.push(vec!["N=3,tau=1".into(), sci(0.25)]);
        assert_eq!(t.to_csv_string(), "cfg,v\n\"N=3,tau=1\",2.5e-1\n");
    }

    #[test]
    fn sci_roundtrips() {
        for v in [1.0 / 3.0, 2.0f64.powi(-7), 6.02e23, 0.0] {
            assert_eq!(sci(v).parse::<f64>().unwrap(), v);
        }
    }
}
