//! Data-file writers: CSV with a parameter-comment line and a header row,
//! or JSON arrays of row objects. Numeric formatting uses the shortest
//! round-trip representation, so files are byte-stable for identical
//! inputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::scenario::OutputFormat;

/// One output table: named columns and rows of JSON-able values.
pub struct Table {
    pub name: String,
    pub comment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, comment: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            comment: comment.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render_cell(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            other => other.to_string(),
        }
    }

    /// Write the table into `dir` as `<name>.csv` or `<name>.json`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<PathBuf> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let path = dir.join(format!(
            "{}.{}",
            self.name,
            match format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
        ));
        let mut buf = Vec::new();
        match format {
            OutputFormat::Csv => {
                writeln!(buf, "# {}", self.comment)?;
                writeln!(buf, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Self::render_cell).collect();
                    writeln!(buf, "{}", cells.join(","))?;
                }
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (c, v) in self.columns.iter().zip(row) {
                            obj.insert(c.clone(), v.clone());
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let doc = serde_json::json!({
                    "parameters": self.comment,
                    "rows": rows,
                });
                serde_json::to_writer_pretty(&mut buf, &doc)?;
                buf.push(b'\n');
            }
        }
        fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// JSON number from f64, mapping non-finite values to null.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map(num).unwrap_or(Value::Null)
}

pub fn text(s: &str) -> Value {
    Value::String(s.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_byte_stable() {
        let dir = std::env::temp_dir().join("aggnet_output_test");
        let mut t = Table::new("stability", "a=1 b=2", &["x", "y"]);
        t.push(vec![num(0.1), num(1.0 / 3.0)]);
        t.push(vec![num(2.0), Value::Null]);
        let p1 = t.write(&dir, OutputFormat::Csv).unwrap();
        let first = std::fs::read(&p1).unwrap();
        let p2 = t.write(&dir, OutputFormat::Csv).unwrap();
        let second = std::fs::read(&p2).unwrap();
        assert_eq!(first, second);
        let body = String::from_utf8(first).unwrap();
        assert!(body.starts_with("# a=1 b=2\nx,y\n0.1,"));
    }

    #[test]
    fn json_rows_carry_columns() {
        let dir = std::env::temp_dir().join("aggnet_output_test_json");
        let mut t = Table::new("rows", "c=3", &["k", "v"]);
        t.push(vec![text("alpha"), num(3.6)]);
        let p = t.write(&dir, OutputFormat::Json).unwrap();
        let doc: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        assert_eq!(doc["rows"][0]["k"], "alpha");
        assert_eq!(doc["rows"][0]["v"], 3.6);
    }
}
