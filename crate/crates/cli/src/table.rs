use std::io::Write;

use clap::ValueEnum;
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Flag(bool),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Flag(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

/// Seventeen significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt_num(*x),
            Cell::Num(x) => x.to_string(),
            Cell::Int(k) => k.to_string(),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt_num(*x),
            Cell::Num(_) | Cell::Missing => "null".into(),
            Cell::Int(k) => k.to_string(),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => serde_json::Value::from(s.as_str()).to_string(),
        }
    }
}

/// Standard trailing columns of every sweep table.
pub const RESULT_COLUMNS: [&str; 6] = ["t", "analytic", "bound", "oracle", "rel_discrepancy", "converged_flag"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// One standard row: parameters, then the result columns, then extras.
#[derive(Debug, Clone, Default)]
pub struct Row {
    pub params: Vec<Cell>,
    pub t: Option<f64>,
    pub analytic: Option<f64>,
    pub bound: Option<f64>,
    pub oracle: Option<f64>,
    pub converged: bool,
    pub extras: Vec<Cell>,
}

pub fn rel_discrepancy(reference: Option<f64>, oracle: Option<f64>) -> Option<f64> {
    match (reference, oracle) {
        (Some(a), Some(o)) => Some((o - a).abs() / a.abs()),
        _ => None,
    }
}

impl Table {
    pub fn new(name: &str, params: &[&str], extras: &[&str]) -> Self {
        let columns = params.iter().chain(RESULT_COLUMNS.iter()).chain(extras.iter()).map(|s| s.to_string()).collect();
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        let reference = row.analytic.or(row.bound);
        let mut cells = row.params;
        cells.extend([
            row.t.into(),
            row.analytic.into(),
            row.bound.into(),
            row.oracle.into(),
            rel_discrepancy(reference, row.oracle).into(),
            row.converged.into(),
        ]);
        cells.extend(row.extras);
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# schema_version={SCHEMA_VERSION} table={}", self.name)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))?;
        }
        out.flush()
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let quote = |s: &str| serde_json::Value::from(s).to_string();
        let cols: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        writeln!(w, "{{")?;
        writeln!(w, "  \"schema_version\": {SCHEMA_VERSION},")?;
        writeln!(w, "  \"table\": {},", quote(&self.name))?;
        writeln!(w, "  \"columns\": [{}],", cols.join(", "))?;
        writeln!(w, "  \"rows\": [")?;
        for (k, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(Cell::json).collect();
            let sep = if k + 1 < self.rows.len() { "," } else { "" };
            writeln!(w, "    [{}]{sep}", cells.join(", "))?;
        }
        writeln!(w, "  ]")?;
        writeln!(w, "}}")
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["nu"], &["ratio"]);
        t.push(Row {
            params: vec![1.0.into()],
            t: Some(0.5),
            analytic: Some(0.1),
            oracle: Some(0.1 + 1e-17),
            converged: true,
            extras: vec![Cell::Missing],
            ..Default::default()
        });
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# schema_version=1 table=demo");
        assert_eq!(lines[1], "nu,t,analytic,bound,oracle,rel_discrepancy,converged_flag,ratio");
        assert!(lines[2].starts_with("1.0000000000000000e0,5.0000000000000000e-1,1.0000000000000001e-1,,"));
        assert!(lines[2].ends_with(",true,"));
    }

    #[test]
    fn json_round_trips_values() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema_version"], 1);
        let row = &v["rows"][0];
        assert_eq!(row[2].as_f64(), Some(0.1));
        assert!(row[3].is_null());
        assert_eq!(row[6], true);
    }
}
