//! Deterministic report rendering.
//!
//! Every real is printed with 17 significant digits, positionally when the
//! decimal exponent lies in `[-5, 17)` and in `d.ddde±x` form otherwise, so
//! output is independent of locale and round-trips to the same double.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Unsigned(u64),
    Real(f64),
    Bool(bool),
    Text(String),
    Vec3([f64; 3]),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Unsigned(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Scalar metadata plus an optional table. JSON puts the table under
/// `rows`; CSV emits the table if present and the metadata row otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub meta: Vec<(String, Cell)>,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self { command, meta: Vec::new(), table: None }
    }

    pub fn with(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.meta.push((key.to_owned(), value.into()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.to_owned(), value.into()));
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    fn to_json(&self) -> Result<String, CliError> {
        let mut obj = Map::new();
        obj.insert("command".into(), Value::String(self.command.into()));
        obj.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        for (k, v) in &self.meta {
            obj.insert(k.clone(), json_cell(k, v)?);
        }
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|row| {
                    let mut r = Map::new();
                    for (c, v) in t.columns.iter().zip(row) {
                        r.insert((*c).into(), json_cell(c, v)?);
                    }
                    Ok(Value::Object(r))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            obj.insert("rows".into(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values always serialize");
        s.push('\n');
        Ok(s)
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let mut records: Vec<Vec<String>> = Vec::new();
        match &self.table {
            Some(t) => {
                records.push(t.columns.iter().map(|c| c.to_string()).collect());
                for row in &t.rows {
                    let mut fields = Vec::with_capacity(row.len());
                    for (c, v) in t.columns.iter().zip(row) {
                        fields.extend(csv_cell(c, v)?);
                    }
                    records.push(fields);
                }
            }
            None => {
                let mut header = Vec::new();
                let mut values = Vec::new();
                for (k, v) in &self.meta {
                    match v {
                        Cell::Vec3(_) => header.extend(["x", "y", "z"].iter().map(|s| format!("{k}_{s}"))),
                        _ => header.push(k.clone()),
                    }
                    values.extend(csv_cell(k, v)?);
                }
                records.push(header);
                records.push(values);
            }
        }
        Ok(csv_text(&records))
    }
}

/// Decimal text with 17 significant digits; non-finite input is an error.
pub fn format_real(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(if x.is_sign_negative() { "-0.0" } else { "0.0" }.into());
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return Some(format!("{mantissa}e{exp}"));
    }
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let split = exp as usize + 1;
        let frac = &digits[split..];
        format!("{}.{}", &digits[..split], if frac.is_empty() { "0" } else { frac })
    };
    Some(format!("{sign}{body}"))
}

fn real(key: &str, x: f64) -> Result<String, CliError> {
    format_real(x).ok_or_else(|| CliError::NonFiniteOutput(key.to_owned()))
}

fn json_number(key: &str, x: f64) -> Result<Value, CliError> {
    let text = real(key, x)?;
    Ok(Value::Number(text.parse::<Number>().expect("formatted reals are valid JSON numbers")))
}

fn json_cell(key: &str, v: &Cell) -> Result<Value, CliError> {
    Ok(match v {
        Cell::Int(i) => Value::from(*i),
        Cell::Unsigned(u) => Value::from(*u),
        Cell::Real(x) => json_number(key, *x)?,
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Vec3(v) => Value::Array(v.iter().map(|x| json_number(key, *x)).collect::<Result<_, _>>()?),
    })
}

fn csv_cell(key: &str, v: &Cell) -> Result<Vec<String>, CliError> {
    Ok(match v {
        Cell::Int(i) => vec![i.to_string()],
        Cell::Unsigned(u) => vec![u.to_string()],
        Cell::Real(x) => vec![real(key, *x)?],
        Cell::Bool(b) => vec![b.to_string()],
        Cell::Text(s) => vec![s.clone()],
        Cell::Vec3(v) => v.iter().map(|x| real(key, *x)).collect::<Result<_, _>>()?,
    })
}

/// RFC 4180 records with `\n` terminators; fields are quoted only when needed.
fn csv_text(records: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for r in records {
        w.write_record(r).expect("writing to memory cannot fail");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

/// Writes `contents` to `path` through a sibling temporary file and a
/// rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_digits() {
        assert_eq!(format_real(4.0).unwrap(), "4.0000000000000000");
        assert_eq!(format_real(-0.125).unwrap(), "-0.12500000000000000");
        assert_eq!(format_real(2f64.powi(-30)).unwrap(), "9.3132257461547852e-10");
        assert_eq!(format_real(2.5e20).unwrap(), "2.5000000000000000e20");
        assert_eq!(format_real(12345.678).unwrap(), "12345.678000000000");
        assert_eq!(format_real(0.0).unwrap(), "0.0");
        assert!(format_real(f64::NAN).is_none());
        assert!(format_real(f64::INFINITY).is_none());
    }

    #[test]
    fn reals_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308, 0.1, 1e16 + 2.0] {
            let s = format_real(x).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_quotes_special_text() {
        let r = Report::new("t").with("plain", "p").with("comma", "a,b").with("quote", "say \"hi\"");
        assert_eq!(r.render(Format::Csv).unwrap(), "plain,comma,quote\np,\"a,b\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn metadata_only_csv_expands_vectors() {
        let r = Report::new("t").with("g", 4.0).with("m", Cell::Vec3([0.0, 1.0, 2.0]));
        assert_eq!(
            r.render(Format::Csv).unwrap(),
            "g,m_x,m_y,m_z\n4.0000000000000000,0.0,1.0000000000000000,2.0000000000000000\n"
        );
    }

    #[test]
    fn non_finite_values_are_refused() {
        let r = Report::new("t").with("g", f64::NAN);
        assert!(matches!(r.render(Format::Json), Err(CliError::NonFiniteOutput(k)) if k == "g"));
    }
}
