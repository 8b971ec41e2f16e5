//! CSV and JSON table emission with full-precision decimal number strings.

use crate::config::OutputFormat;
use std::io::Write;

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn emit(&self, format: OutputFormat, w: &mut impl Write) -> std::io::Result<()> {
        match format {
            OutputFormat::Csv => {
                writeln!(w, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    writeln!(w, "{}", row.join(","))?;
                }
            }
            OutputFormat::Json => {
                let objs: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = serde_json::Map::new();
                        for (c, v) in self.columns.iter().zip(row.iter()) {
                            m.insert(c.clone(), serde_json::Value::String(v.clone()));
                        }
                        serde_json::Value::Object(m)
                    })
                    .collect();
                writeln!(w, "{}", serde_json::to_string_pretty(&objs)?)?;
            }
        }
        Ok(())
    }

    pub fn to_string(&self, format: OutputFormat) -> String {
        let mut buf = Vec::new();
        self.emit(format, &mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf8 table")
    }
}
