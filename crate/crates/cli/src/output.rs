use num::complex::Complex64;
use serde_json::{Map, Number, Value};

use crate::job::Format;

/// `x` with 17 significant digits; non-finite values become `null`.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{:.16e}", x);
    Value::Number(
        text.parse::<Number>()
            .expect("formatted float is valid JSON"),
    )
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![real(z.re), real(z.im)])
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

/// An ordered record, optionally holding one table of row records under
/// `table`.
pub struct Report {
    pub fields: Map<String, Value>,
    pub table: Option<&'static str>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), text(command));
        Self {
            fields,
            table: None,
        }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.insert(key.into(), value);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(&Value::Object(self.fields.clone())),
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self
            .table
            .and_then(|k| self.fields.get(k))
            .and_then(Value::as_array)
        {
            Some(rows) => {
                let objects: Vec<&Map<String, Value>> =
                    rows.iter().filter_map(Value::as_object).collect();
                if let Some(first) = objects.first() {
                    let header: Vec<String> =
                        first.iter().flat_map(|(k, v)| csv_columns(k, v)).collect();
                    w.write_record(&header).expect("in-memory write");
                }
                for row in objects {
                    let cells: Vec<String> = row.values().flat_map(csv_cells).collect();
                    w.write_record(&cells).expect("in-memory write");
                }
            }
            None => {
                w.write_record(["field", "value"]).expect("in-memory write");
                for (k, v) in &self.fields {
                    w.write_record([k.as_str(), &scalar_text(v)])
                        .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn text(&self) -> String {
        let width = self.fields.keys().map(String::len).max().unwrap_or(0);
        let mut out = String::new();
        let mut tables = Vec::new();
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                    tables.push((k, items))
                }
                Value::Array(items) if items.is_empty() => {}
                _ => out.push_str(&format!("{:<width$}  {}\n", k, human(v), width = width)),
            }
        }
        for (k, items) in tables {
            out.push_str(&format!("\n{}:\n", k));
            out.push_str(&text_table(items));
        }
        out
    }
}

pub fn json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn is_complex(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.len() == 2 && a.iter().all(|x| x.is_number() || x.is_null()))
}

fn csv_columns(key: &str, v: &Value) -> Vec<String> {
    if is_complex(v) {
        vec![format!("{}_re", key), format!("{}_im", key)]
    } else {
        vec![key.to_string()]
    }
}

fn csv_cells(v: &Value) -> Vec<String> {
    match v {
        Value::Array(a) if is_complex(v) => a.iter().map(scalar_text).collect(),
        _ => vec![scalar_text(v)],
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

fn short(v: &Value) -> String {
    if v.is_u64() || v.is_i64() {
        return scalar_text(v);
    }
    match v.as_f64() {
        Some(x) => format!("{:.10e}", x),
        None if v.is_null() => "nan".into(),
        None => scalar_text(v),
    }
}

fn human(v: &Value) -> String {
    match v {
        Value::Array(a) if is_complex(v) => {
            let im = a[1].as_f64().unwrap_or(f64::NAN);
            let sign = if im.is_sign_negative() { '-' } else { '+' };
            format!("{} {} {:.10e}i", short(&a[0]), sign, im.abs())
        }
        Value::Array(a) => a.iter().map(human).collect::<Vec<_>>().join(", "),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{}={}", k, human(v)))
            .collect::<Vec<_>>()
            .join(", "),
        Value::Number(_) | Value::Null => short(v),
        _ => scalar_text(v),
    }
}

fn text_table(items: &[Value]) -> String {
    let rows: Vec<&Map<String, Value>> = items.iter().filter_map(Value::as_object).collect();
    let header: Vec<&String> = rows[0].keys().collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.values().map(human).collect())
        .collect();
    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(j, h)| {
            cells
                .iter()
                .map(|r| r.get(j).map_or(0, String::len))
                .chain([h.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: Vec<&str>| {
        let mut s = items
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{:<w$}", c, w = w))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(header.iter().map(|h| h.as_str()).collect());
    out.push_str(&line(
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect(),
    ));
    for r in &cells {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
