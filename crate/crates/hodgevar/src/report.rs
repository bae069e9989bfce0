//! Report values and their JSON, aligned-text and CSV renderings.

use serde_json::{json, Value};

use hodgevar_core::C64;

use crate::config::{Complex, Format};

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    let r = round12(x);
    if r.is_finite() {
        json!(r)
    } else {
        json!(r.to_string())
    }
}

pub fn complex(z: C64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn point(t: &[C64]) -> Value {
    Value::Array(t.iter().map(|z| complex(*z)).collect())
}

/// Text form of a number with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    let r = round12(x);
    if r.fract() == 0.0 && r.abs() < 1e12 {
        format!("{}", r as i64)
    } else {
        format!("{r:e}")
    }
}

pub fn fmt_point(t: &[C64]) -> String {
    let parts: Vec<String> = t
        .iter()
        .map(|z| Complex(C64::new(round12(z.re), round12(z.im))).to_string())
        .collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }
}

/// Result of one command: the JSON document, its main table, and the table
/// used for CSV export.
#[derive(Clone, Debug)]
pub struct Output {
    pub json: Value,
    pub table: Table,
    pub csv: Option<Table>,
    /// Diagnostics for stderr.
    pub warnings: Vec<String>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable report");
                s.push('\n');
                s
            }
            Format::Table => self.table.to_text(),
            Format::Csv => self.csv.as_ref().unwrap_or(&self.table).to_csv(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-0.0), 0.0);
        assert_eq!(fmt_num(1.5e-15), "1.5e-15");
        assert_eq!(fmt_num(49.0), "49");
        assert_eq!(num(f64::INFINITY), json!("inf"));
    }

    #[test]
    fn aligned_text() {
        let mut t = Table::new(&["a", "long"]);
        t.push(vec!["xyz".into(), "1".into()]);
        assert_eq!(t.to_text(), "a    long\nxyz  1\n");
    }

    #[test]
    fn csv_quotes() {
        let mut t = Table::new(&["t", "v"]);
        t.push(vec!["(0, 1)".into(), "2".into()]);
        t.push(vec!["a,b".into(), "3".into()]);
        assert_eq!(t.to_csv(), "t,v\n\"(0, 1)\",2\n\"a,b\",3\n");
    }
}
