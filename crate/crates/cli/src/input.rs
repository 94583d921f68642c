//! Readers for the CSV and list inputs.

use crate::Failure;

/// A labelled CSV table: header cells after the first, then one labelled row
/// of raw cells per record.
pub struct LabelledCsv {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<String>)>,
}

pub fn read_labelled_csv(text: &str, what: &str) -> Result<LabelledCsv, Failure> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Failure::input(format!("{what}: {e}")))?.clone();
    if header.len() < 2 {
        return Err(Failure::input(format!("{what}: header needs a label column and at least one data column")));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Failure::input(format!("{what}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Failure::input(format!("{what}, line {line}: expected {} fields, found {}", header.len(), record.len())));
        }
        let label = record[0].to_owned();
        if label.is_empty() {
            return Err(Failure::input(format!("{what}, line {line}: empty label")));
        }
        if rows.iter().any(|(l, _)| *l == label) {
            return Err(Failure::input(format!("{what}, line {line}: duplicate label {label:?}")));
        }
        rows.push((label, record.iter().skip(1).map(str::to_owned).collect()));
    }
    if rows.is_empty() {
        return Err(Failure::input(format!("{what}: no data rows")));
    }
    Ok(LabelledCsv { columns, rows })
}

pub fn parse_number(cell: &str, what: &str, label: &str, column: &str) -> Result<f64, Failure> {
    cell.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Failure::input(format!("{what}: row {label:?}, column {column:?}: {cell:?} is not a finite number")))
}

/// Splits a comma-separated generator list.
pub fn generator_list(text: &str) -> Vec<String> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

pub fn read_file(path: &str) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::input(format!("cannot read {path}: {e}")))
}

pub fn utf8<'a>(bytes: &'a [u8], path: &str) -> Result<&'a str, Failure> {
    std::str::from_utf8(bytes).map_err(|e| Failure::input(format!("{path} is not UTF-8: {e}")))
}
