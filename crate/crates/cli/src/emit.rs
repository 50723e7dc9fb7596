//! CSV and JSON writers with fixed 17-significant-digit floats.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_json::{Map, Value};

/// One table cell. Complex cells become paired `_re`/`_im` CSV columns.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    C(Complex64),
    I(i64),
    B(bool),
    S(String),
}

pub type Record = Vec<(String, Cell)>;

/// What a command produced: the echoed inputs, table rows, and extra
/// report entries that only the JSON form carries in full.
#[derive(Debug, Clone, Default)]
pub struct Emission {
    pub inputs: Map<String, Value>,
    pub rows: Vec<Record>,
    pub report: Map<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn float(x: f64) -> String {
    if x == 0.0 {
        // no signed zeros in tables
        "0.0000000000000000e0".into()
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn cell_value(c: &Cell) -> Value {
    match c {
        Cell::F(x) => Value::from(*x),
        Cell::C(z) => Value::from(vec![z.re, z.im]),
        Cell::I(n) => Value::from(*n),
        Cell::B(b) => Value::from(*b),
        Cell::S(s) => Value::from(s.clone()),
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[Record]) -> io::Result<()> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let header: Vec<String> = first
        .iter()
        .flat_map(|(name, c)| match c {
            Cell::C(_) => vec![format!("{name}_re"), format!("{name}_im")],
            _ => vec![name.clone()],
        })
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row
            .iter()
            .flat_map(|(_, c)| match c {
                Cell::F(x) => vec![float(*x)],
                Cell::C(z) => vec![float(z.re), float(z.im)],
                Cell::I(n) => vec![n.to_string()],
                Cell::B(b) => vec![b.to_string()],
                Cell::S(s) => vec![csv_text(s)],
            })
            .collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Wraps a formatter so every float is written as `{:.16e}`.
struct FixedDigits<F>(F);

impl<F: Formatter> Formatter for FixedDigits<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    let mut ser =
        serde_json::Serializer::with_formatter(&mut *out, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    writeln!(out)
}

impl Emission {
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("inputs".into(), Value::Object(self.inputs.clone()));
        if !self.rows.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|r| Value::Object(r.iter().map(|(k, c)| (k.clone(), cell_value(c))).collect()))
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
        }
        for (k, v) in &self.report {
            doc.insert(k.clone(), v.clone());
        }
        Value::Object(doc)
    }

    /// Write the emission; in CSV form the report goes to `side` as one
    /// compact JSON line.
    pub fn write<W: Write, S: Write>(
        &self,
        format: Format,
        out: &mut W,
        side: &mut S,
    ) -> io::Result<()> {
        match format {
            Format::Json => write_json(out, &self.to_json()),
            Format::Csv => {
                write_csv(out, &self.rows)?;
                if !self.report.is_empty() {
                    write_json_line(side, &Value::Object(self.report.clone()))?;
                }
                Ok(())
            }
        }
    }
}

fn write_json_line<W: Write>(out: &mut W, value: &Value) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, FixedDigits(CompactFormatter));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    writeln!(out)
}
