//! Long-format tables and their CSV / JSON serialisation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    List(Vec<f64>),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<i8> for Cell {
    fn from(n: i8) -> Self {
        Cell::Int(n.into())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Vec<f64>> for Cell {
    fn from(v: Vec<f64>) -> Self {
        Cell::List(v)
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => sig12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::List(v) => v.iter().map(|x| sig12(*x)).collect::<Vec<_>>().join(";"),
        }
    }

    fn to_json(&self) -> Value {
        // Floats go through the same 12-digit rounding as the CSV.
        let float = |x: f64| {
            sig12(x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number)
        };
        match self {
            Cell::Float(x) => float(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::List(v) => Value::Array(v.iter().map(|x| float(*x)).collect()),
        }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-5 <= |x| < 1e12`.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Rows in a fixed column order plus the reproducibility trailer.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub trailer: Vec<(&'static str, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str], trailer: Vec<(&'static str, String)>) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            trailer,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn trailer_line(&self) -> String {
        let mut line = format!("# tprh {}", env!("CARGO_PKG_VERSION"));
        for (key, value) in &self.trailer {
            line.push_str(&format!(" {key}={value}"));
        }
        line
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv))?;
                }
                w.flush()?;
                drop(w);
                writeln!(out, "{}", self.trailer_line())?;
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.to_json()))
                            .collect();
                        Value::Object(map)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &records)?;
                writeln!(out)?;
            }
        }
        out.flush()
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(table: &Table, format: Format, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => table.write(format, &mut BufWriter::new(File::create(p)?)),
        None => table.write(format, &mut io::stdout().lock()),
    }
}

/// `dir/stem.<tag>.<ext>` next to a primary output file.
pub fn companion_path(path: &Path, tag: &str, format: Format) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.{}", format.extension()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.08838834764831845), "0.0883883476483");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-0.5), "-0.5");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(123456789.123456789), "123456789.123");
        assert_eq!(sig12(9.99999999999951), "10");
        assert_eq!(sig12(1.5e-12), "1.5e-12");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(f64::NAN), "NaN");
    }

    #[test]
    fn twelve_digits_recover_the_value() {
        for x in [0.6338834765123, 3.356947455, 1e-7, -2.5e15] {
            let back: f64 = sig12(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-12 * x.abs());
        }
    }

    fn sample() -> Table {
        let mut t = Table::new(&["N", "g", "ok", "p"], vec![("omega", "0.5".into())]);
        t.push(vec![2usize.into(), 0.1.into(), true.into(), vec![1.0, -0.25].into()]);
        t
    }

    #[test]
    fn csv_has_header_and_trailer() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "N,g,ok,p");
        assert_eq!(lines[1], "2,0.1,true,1;-0.25");
        assert!(lines[2].starts_with("# tprh ") && lines[2].ends_with("omega=0.5"));
    }

    #[test]
    fn json_keeps_column_order() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        let record = v[0].as_object().unwrap();
        assert_eq!(record.keys().collect::<Vec<_>>(), ["N", "g", "ok", "p"]);
        assert_eq!(record["p"][1], -0.25);
    }

    #[test]
    fn companion_file_name() {
        let p = companion_path(Path::new("out/sweep.csv"), "baselines", Format::Csv);
        assert_eq!(p, PathBuf::from("out/sweep.baselines.csv"));
    }
}
