//! Flat result tables with CSV and JSON renderings.

use std::fmt;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // shortest representation that parses back to the same bits
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
            Value::Missing => Ok(()),
        }
    }
}

impl Value {
    /// Inverse of `Display` for fields read back from CSV.
    pub fn parse(field: &str) -> Self {
        if field.is_empty() {
            return Value::Missing;
        }
        if let Ok(b) = field.parse::<bool>() {
            return Value::Bool(b);
        }
        if let Ok(i) = field.parse::<i64>() {
            return Value::Int(i);
        }
        match field.parse::<f64>() {
            Ok(v) => Value::Float(v),
            Err(_) => Value::Text(field.to_string()),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Float(v) => serde_json::Number::from_f64(*v)
                .map_or(serde_json::Value::Null, serde_json::Value::Number),
            Value::Int(v) => (*v).into(),
            Value::Bool(v) => (*v).into(),
            Value::Text(s) => s.clone().into(),
            Value::Missing => serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .expect("in-memory write");
        }
        let body =
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        format!("#schema={SCHEMA}\n{body}")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.to_json()))
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "schema": SCHEMA, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        match lines.next() {
            Some(l) if l == format!("#schema={SCHEMA}") => {}
            other => return Err(format!("missing schema line, found {other:?}")),
        }
        let rest: String = text.split_once('\n').map_or("", |x| x.1).to_string();
        let mut r = csv::Reader::from_reader(rest.as_bytes());
        let columns = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = Table {
            columns,
            rows: Vec::new(),
        };
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            table.rows.push(rec.iter().map(Value::parse).collect());
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_render_round_trip() {
        for v in [0.1, 1.0, -2.5e-12, 1e300, 0.022821587761649276, f64::NAN] {
            let s = Value::Float(v).to_string();
            match Value::parse(&s) {
                Value::Float(w) => assert!(w == v || (w.is_nan() && v.is_nan())),
                other => panic!("{s} parsed as {other:?}"),
            }
        }
        assert_eq!(Value::parse("3"), Value::Int(3));
        assert_eq!(Value::parse(""), Value::Missing);
        assert_eq!(Value::parse("r_opt"), Value::Text("r_opt".into()));
    }

    #[test]
    fn csv_has_schema_line_and_round_trips() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1.5.into(), 2i64.into(), Value::Missing]);
        t.push(vec![(-0.0001).into(), true.into(), "x".into()]);
        let csv = t.to_csv();
        assert!(csv.starts_with("#schema=1\na,b,c\n"));
        let back = Table::from_csv(&csv).unwrap();
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn json_uses_column_names_as_keys() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![f64::INFINITY.into(), 1i64.into()]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["rows"][0]["x"].is_null());
        assert_eq!(v["rows"][0]["y"], 1);
    }
}
