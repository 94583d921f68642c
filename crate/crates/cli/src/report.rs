//! Run reports and their text, JSON and CSV renderings.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value as Json};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(i64),
    Real(f64),
    Bool(bool),
    List(Vec<Value>),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// A labelled matrix: first column holds `labels`, the rest one column per
    /// entry of `col_labels`.
    pub fn matrix(corner: &str, labels: &[String], col_labels: &[String], cell: impl Fn(usize, usize) -> Value) -> Self {
        let mut t = Table::new(std::iter::once(corner.to_owned()).chain(col_labels.iter().cloned()));
        for (i, l) in labels.iter().enumerate() {
            let mut row = vec![Value::Text(l.clone())];
            row.extend((0..col_labels.len()).map(|j| cell(i, j)));
            t.push(row);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Value(Value),
    Table(Table),
}

#[derive(Debug, Clone)]
pub struct Input {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<Input>,
    pub config: Vec<(String, Value)>,
    pub results: Vec<(String, Entry)>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_owned(), inputs: Vec::new(), config: Vec::new(), results: Vec::new(), warnings: Vec::new() }
    }

    pub fn input(&mut self, role: &str, path: &str, bytes: &[u8]) {
        let sha256 = hex::encode(Sha256::digest(bytes));
        self.inputs.push(Input { role: role.to_owned(), path: path.to_owned(), sha256 });
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) {
        self.config.push((key.to_owned(), value.into()));
    }

    pub fn value(&mut self, key: &str, value: impl Into<Value>) {
        self.results.push((key.to_owned(), Entry::Value(value.into())));
    }

    pub fn table(&mut self, key: &str, table: Table) {
        self.results.push((key.to_owned(), Entry::Table(table)));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Text => self.render_text(precision),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(precision)).expect("report is valid JSON");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(precision),
        }
    }

    fn render_text(&self, p: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for i in &self.inputs {
            let _ = writeln!(out, "input {}: {} (sha256 {})", i.role, i.path, i.sha256);
        }
        for (k, v) in &self.config {
            let _ = writeln!(out, "config {k}: {}", fmt_value(v, p));
        }
        for (k, e) in &self.results {
            match e {
                Entry::Value(v) => {
                    let _ = writeln!(out, "{k}: {}", fmt_value(v, p));
                }
                Entry::Table(t) => {
                    let _ = writeln!(out, "{k}:");
                    out.push_str(&aligned(t, p));
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }

    fn to_json(&self, p: usize) -> Json {
        let mut root = Map::new();
        root.insert("command".into(), Json::String(self.command.clone()));
        let inputs = self
            .inputs
            .iter()
            .map(|i| {
                let mut m = Map::new();
                m.insert("role".into(), Json::String(i.role.clone()));
                m.insert("path".into(), Json::String(i.path.clone()));
                m.insert("sha256".into(), Json::String(i.sha256.clone()));
                Json::Object(m)
            })
            .collect();
        root.insert("inputs".into(), Json::Array(inputs));
        root.insert("config".into(), Json::Object(self.config.iter().map(|(k, v)| (k.clone(), json_value(v, p))).collect()));
        let results = self
            .results
            .iter()
            .map(|(k, e)| {
                let v = match e {
                    Entry::Value(v) => json_value(v, p),
                    Entry::Table(t) => {
                        let mut m = Map::new();
                        m.insert("columns".into(), t.columns.iter().cloned().map(Json::String).collect());
                        m.insert(
                            "rows".into(),
                            t.rows.iter().map(|r| Json::Array(r.iter().map(|v| json_value(v, p)).collect())).collect(),
                        );
                        Json::Object(m)
                    }
                };
                (k.clone(), v)
            })
            .collect();
        root.insert("results".into(), Json::Object(results));
        root.insert("warnings".into(), self.warnings.iter().cloned().map(Json::String).collect());
        Json::Object(root)
    }

    /// One block per table and one `key,value` block for everything else,
    /// each introduced by a `# name` line.
    fn render_csv(&self, p: usize) -> String {
        let mut summary = vec![vec!["command".to_owned(), self.command.clone()]];
        for i in &self.inputs {
            summary.push(vec![format!("input.{}", i.role), i.path.clone(), i.sha256.clone()]);
        }
        for (k, v) in &self.config {
            summary.push(vec![format!("config.{k}"), fmt_value(v, p)]);
        }
        let mut tables = Vec::new();
        for (k, e) in &self.results {
            match e {
                Entry::Value(v) => summary.push(vec![k.clone(), fmt_value(v, p)]),
                Entry::Table(t) => tables.push((k, t)),
            }
        }
        for w in &self.warnings {
            summary.push(vec!["warning".into(), w.clone()]);
        }

        let mut out = String::from("# summary\n");
        out.push_str(&csv_block(summary.into_iter()));
        for (k, t) in tables {
            let _ = writeln!(out, "# {k}");
            let rows = std::iter::once(t.columns.clone()).chain(t.rows.iter().map(|r| r.iter().map(|v| fmt_value(v, p)).collect()));
            out.push_str(&csv_block(rows));
        }
        out
    }
}

fn csv_block(rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("writing to memory cannot fail");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV output is UTF-8")
}

fn aligned(t: &Table, p: usize) -> String {
    let cells: Vec<Vec<String>> =
        std::iter::once(t.columns.clone()).chain(t.rows.iter().map(|r| r.iter().map(|v| fmt_value(v, p)).collect())).collect();
    let widths: Vec<usize> =
        (0..t.columns.len()).map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, w))| if j == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "  {}", line.join("  ").trim_end());
    }
    out
}

/// Fixed-decimal rendering; negative zero prints as zero.
pub fn fmt_real(x: f64, p: usize) -> String {
    let s = format!("{x:.p$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_owned()
    } else {
        s
    }
}

fn fmt_value(v: &Value, p: usize) -> String {
    match v {
        Value::Text(s) => s.clone(),
        Value::Int(n) => n.to_string(),
        Value::Real(x) => fmt_real(*x, p),
        Value::Bool(b) => b.to_string(),
        Value::List(items) => items.iter().map(|i| fmt_value(i, p)).collect::<Vec<_>>().join(", "),
    }
}

fn json_value(v: &Value, p: usize) -> Json {
    match v {
        Value::Text(s) => Json::String(s.clone()),
        Value::Int(n) => Json::Number((*n).into()),
        Value::Real(x) => fmt_real(*x, p).parse::<f64>().ok().and_then(Number::from_f64).map_or(Json::Null, Json::Number),
        Value::Bool(b) => Json::Bool(*b),
        Value::List(items) => Json::Array(items.iter().map(|i| json_value(i, p)).collect()),
    }
}
