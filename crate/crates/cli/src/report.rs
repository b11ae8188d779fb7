//! Fixed-precision CSV and JSON emission.

use serde_json::Value;

/// Significant digits of every floating-point value written.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.*e}", DIGITS - 1, x)
    }
}

/// Round to the printed precision so JSON and CSV carry the same digits.
pub fn round_float(x: f64) -> f64 {
    if x.is_finite() {
        format_float(x).parse().unwrap_or(x)
    } else {
        x
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// CSV table preceded by a `#` provenance line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub provenance: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { provenance: Vec::new(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# ");
        let prov: Vec<String> = self.provenance.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&prov.join(" "));
        out.push('\n');
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_float(n.as_f64().unwrap());
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to [`DIGITS`] significant digits.
pub fn to_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_value(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_float(5.783185962946784), "5.78318596295e0");
        assert_eq!(format_float(-1e-300), "-1.00000000000e-300");
        assert_eq!(round_float(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.provenance.push(("gamma".into(), "0.25".into()));
        t.push(vec![1.5.into(), Cell::Missing]);
        assert_eq!(t.to_csv(), "# gamma=0.25\na,b\n1.50000000000e0,\n");
    }
}
