use std::io::Write;

use serde_json::{Map, Value};

use crate::settings::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        // 17 significant digits round-trip every f64.
        Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
        Cell::Num(v) => v.to_string(),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::from(s.as_str()),
    }
}

impl Table {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(csv_field).collect();
                    writeln!(out, "{}", fields.join(","))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), json_value(v))).collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &Value::Array(rows))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_digits_round_trip() {
        for v in [0.1, -0.273331892519811, 1e-300, std::f64::consts::PI, 2.0f64.powi(-1074)] {
            let s = csv_field(&Cell::Num(v));
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(csv_field(&Cell::Num(f64::NAN)), "NaN");
        assert_eq!(csv_field(&Cell::Text("a,b".into())), "\"a,b\"");
    }

    #[test]
    fn json_keeps_column_order() {
        let t = Table {
            columns: vec!["m", "L", "status"],
            rows: vec![vec![1.0.into(), 0.5.into(), "ok".into()]],
        };
        let mut buf = Vec::new();
        t.write(Format::Json, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.find("\"m\"").unwrap() < s.find("\"L\"").unwrap());
    }
}
