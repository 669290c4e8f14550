use std::fs;
use std::path::Path;

use super::pipeline::{io_err, write_file};
use super::HarnessError;

/// Header plus string rows; every emitted table goes through this.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// `# provenance` line followed by the table.
    pub fn render(&self, provenance: &str) -> Result<String, HarnessError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| HarnessError::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Config(format!("csv: {e}")))?;
        let body = String::from_utf8(bytes).expect("csv output of UTF-8 fields is UTF-8");
        Ok(format!("# {provenance}\n{body}"))
    }
}

/// Fixed precision used for every number in a table.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.6}")
}

pub fn write_csv(path: &Path, provenance: &str, table: &CsvTable) -> Result<(), HarnessError> {
    write_file(path, &table.render(provenance)?)
}

/// Reads a table written by [`write_csv`]; returns its provenance line
/// without the leading `# `.
pub fn read_csv(path: &Path) -> Result<(String, CsvTable), HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let parse_err = |message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let provenance = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| parse_err("first line must be a `# config_sha256=.. seed=..` header".into()))?
        .to_string();
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()).map_err(|e| parse_err(e.to_string())))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok((provenance, CsvTable { header, rows }))
}
