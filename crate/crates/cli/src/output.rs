//! Output documents: one JSON object or one CSV table per invocation.

use rug::{Complex, Float};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal string with `digits` significant digits.
pub fn dec(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits))
}

/// A table of rows plus document-level metadata.
pub struct Doc {
    command: &'static str,
    digits: usize,
    meta: Map<String, Value>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Doc {
    pub fn new(command: &'static str, digits: usize) -> Self {
        Self { command, digits, meta: Map::new(), columns: Vec::new(), rows: Vec::new() }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn meta(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.meta.insert(key.to_string(), v.into());
        self
    }

    pub fn row(&mut self) -> RowBuilder<'_> {
        RowBuilder { doc: self, cells: Vec::new() }
    }

    fn push(&mut self, cells: Vec<(String, Value)>) {
        let mut row = vec![Value::Null; self.columns.len()];
        for (k, v) in cells {
            let i = match self.columns.iter().position(|c| *c == k) {
                Some(i) => i,
                None => {
                    self.columns.push(k);
                    for r in &mut self.rows {
                        r.push(Value::Null);
                    }
                    row.push(Value::Null);
                    self.columns.len() - 1
                }
            };
            row[i] = v;
        }
        self.rows.push(row);
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    if !v.is_null() {
                        m.insert(c.clone(), v.clone());
                    }
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "digits": self.digits,
            "meta": Value::Object(self.meta.clone()),
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
    }

    /// Rows only; metadata does not fit a flat table.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r
                .iter()
                .map(|v| match v {
                    Value::Null => String::new(),
                    Value::String(s) => csv_field(s),
                    other => csv_field(&other.to_string()),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub struct RowBuilder<'a> {
    doc: &'a mut Doc,
    cells: Vec<(String, Value)>,
}

impl RowBuilder<'_> {
    pub fn val(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.cells.push((key.to_string(), v.into()));
        self
    }

    pub fn real(self, key: &str, x: &Float) -> Self {
        let s = dec(x, self.doc.digits);
        self.val(key, s)
    }

    /// Complex values become `<key>_re` and `<key>_im`.
    pub fn complex(self, key: &str, z: &Complex) -> Self {
        let d = self.doc.digits;
        let (re, im) = (dec(z.real(), d), dec(z.imag(), d));
        self.val(&format!("{key}_re"), re).val(&format!("{key}_im"), im)
    }

    pub fn done(self) {
        self.doc.push(self.cells);
    }
}
