//! Tabular results rendered as CSV (with a schema line) or one JSON document.

use std::io::Write;

use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "cuethin/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A cell keeps both its CSV text and its JSON value.
#[derive(Clone, Debug)]
pub struct Cell {
    text: String,
    json: Value,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        // Shortest round-trip form, switching to an exponent for extreme magnitudes.
        let text = if v.is_finite() { format!("{v:?}") } else { String::new() };
        let json = serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number);
        Cell { text, json }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell { text: String::new(), json: Value::Null }, Cell::from)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell { text: v.to_string(), json: json!(v) }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell { text: v.to_string(), json: json!(v) }
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell { text: v.to_string(), json: json!(v) }
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell { text: v.to_string(), json: json!(v) }
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell { json: json!(v), text: v }
    }
}

impl Cell {
    /// A decimal string with more digits than f64 carries; JSON keeps it as a string.
    pub fn decimal(text: String) -> Self {
        Cell { json: Value::String(text.clone()), text }
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra JSON-only structure, such as a term breakdown.
    pub extra: Map<String, Value>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self { command, columns: columns.to_vec(), rows: Vec::new(), extra: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "# schema={SCHEMA} command={}", self.command)?;
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(|c| c.text.as_str()))?;
                }
                w.flush()
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().map(|c| c.json.clone())).collect()))
                    .collect();
                let mut doc = Map::new();
                doc.insert("schema".into(), json!(SCHEMA));
                doc.insert("command".into(), json!(self.command));
                doc.insert("rows".into(), Value::Array(rows));
                for (k, v) in &self.extra {
                    doc.insert(k.clone(), v.clone());
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)
            }
        }
    }
}
