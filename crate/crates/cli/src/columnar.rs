//! Plain-text tables: one header line, space-separated columns, floats at 17
//! significant digits. A `<name>.meta` sidecar records the config digest that
//! produced the file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(i) => i as f64,
            Cell::Float(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(" ");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => format!("{x:.16e}"),
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let header: Vec<String> = lines.next()?.split_whitespace().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map(Cell::Int)
                        .or_else(|_| tok.parse::<f64>().map(Cell::Float))
                        .ok()
                })
                .collect::<Option<Vec<_>>>()?;
            if row.len() != header.len() {
                return None;
            }
            rows.push(row);
        }
        Some(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }
}

fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta");
    path.with_file_name(name)
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Write `table` and its sidecar.
pub fn write(path: &Path, table: &Table, command: &str, digest: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, table.render()).map_err(|e| io_error(path, e))?;
    let mut meta = String::new();
    writeln!(meta, "command = \"{command}\"").unwrap();
    writeln!(meta, "config_sha256 = \"{digest}\"").unwrap();
    let mp = meta_path(path);
    std::fs::write(&mp, meta).map_err(|e| io_error(&mp, e))
}

/// State of a previously written output.
#[derive(Debug, Clone, PartialEq)]
pub enum Existing {
    Missing,
    /// Present but produced by a different configuration (recorded digest).
    Stale(String),
    Fresh(Table),
}

pub fn read(path: &Path, digest: &str) -> Existing {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Existing::Missing;
    };
    let Some(table) = Table::parse(&text) else {
        return Existing::Stale("unreadable".into());
    };
    let recorded = std::fs::read_to_string(meta_path(path))
        .ok()
        .and_then(|m| m.parse::<toml::Table>().ok())
        .and_then(|m| m.get("config_sha256")?.as_str().map(str::to_owned));
    match recorded {
        Some(d) if d == digest => Existing::Fresh(table),
        Some(d) => Existing::Stale(d),
        None => Existing::Stale("no sidecar".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_at_full_precision() {
        let mut t = Table::new(&["n", "x"]);
        t.push(vec![Cell::Int(3), Cell::Float(0.1 + 0.2)]);
        t.push(vec![Cell::Int(-1), Cell::Float(-1e-300)]);
        let text = t.render();
        assert!(text.starts_with("n x\n3 3.0000000000000004e-1\n"));
        assert_eq!(Table::parse(&text).unwrap(), t);
        assert_eq!(t.column("x").unwrap()[0], 0.1 + 0.2);
    }

    #[test]
    fn staleness() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tbl");
        assert_eq!(read(&p, "abc"), Existing::Missing);
        let t = Table::new(&["a"]);
        write(&p, &t, "x", "abc").unwrap();
        assert_eq!(read(&p, "abc"), Existing::Fresh(t));
        assert_eq!(read(&p, "def"), Existing::Stale("abc".into()));
    }
}
