//! Tables, CSV/JSON emission and the JSON sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use qmacro::tolerances::TOLERANCES;

use crate::config::{Format, Layout, RunConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    /// CSV text: 17 significant digits for floats.
    pub fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Per value column, the library call that reproduces it.
    pub calls: Vec<(String, String)>,
    /// Number of leading columns that identify a grid point (wide layout).
    pub key_columns: usize,
    /// Columns naming a series (wide layout); the rest of the non-key
    /// columns are dropped except `value`.
    pub series_columns: Vec<usize>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    /// Pivots a long table to one row per key and one column per series.
    /// Rows sharing a key must be adjacent, which the runners guarantee.
    pub fn wide(&self) -> Table {
        let Some(value_col) = self.columns.iter().position(|c| c == "value") else {
            return self.clone();
        };
        if self.series_columns.is_empty() {
            return self.clone();
        }
        let k = self.key_columns;
        let series_name = |row: &[Cell]| -> String {
            self.series_columns
                .iter()
                .map(|&c| format!("{}={}", self.columns[c], short(&row[c])))
                .collect::<Vec<_>>()
                .join("|")
        };
        let mut names: Vec<String> = Vec::new();
        for row in &self.rows {
            let s = series_name(row);
            if !names.contains(&s) {
                names.push(s);
            }
        }
        let mut out = Table::new(&[]);
        out.columns = self.columns[..k].to_vec();
        out.columns.extend(names.iter().cloned());
        out.calls = self.calls.clone();
        out.key_columns = k;
        let mut current: Option<(Vec<Cell>, Vec<Cell>)> = None;
        for row in &self.rows {
            let key = row[..k].to_vec();
            if current.as_ref().map(|(ck, _)| ck != &key).unwrap_or(true) {
                if let Some((ck, vals)) = current.take() {
                    out.rows.push(ck.into_iter().chain(vals).collect());
                }
                current = Some((key, vec![Cell::Empty; names.len()]));
            }
            let idx = names.iter().position(|n| *n == series_name(row)).expect("series collected above");
            current.as_mut().unwrap().1[idx] = row[value_col].clone();
        }
        if let Some((ck, vals)) = current {
            out.rows.push(ck.into_iter().chain(vals).collect());
        }
        out
    }
}

fn short(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format!("{x}"),
        other => other.csv(),
    }
}

pub fn write_csv<W: Write>(table: &Table, w: W) -> std::io::Result<()> {
    // keep the io::ErrorKind visible to callers
    fn io(e: csv::Error) -> std::io::Error {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => e,
            other => std::io::Error::other(format!("{other:?}")),
        }
    }
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        wr.write_record(row.iter().map(Cell::csv)).map_err(io)?;
    }
    wr.flush()
}

pub fn write_json<W: Write>(table: &Table, mut w: W) -> std::io::Result<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (c, v) in table.columns.iter().zip(r) {
                m.insert(c.clone(), v.json());
            }
            Value::Object(m)
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &Value::Array(rows))?;
    writeln!(w)
}

/// Sidecar content: configuration, versions, tolerances, and the library
/// call behind every value column.
pub fn sidecar(config: &RunConfig, table: &Table) -> Value {
    let tolerances: Map<String, Value> = TOLERANCES.entries().iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let calls: Map<String, Value> = table.calls.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "tool": "qmacro",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "tolerances": tolerances,
        "columns": table.columns,
        "rows": table.rows.len(),
        "calls": calls,
    })
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the table (in the configured layout and format) to `config.out`,
/// plus the sidecar, or to `stdout` when no path is set.
pub fn emit<W: Write>(config: &RunConfig, table: &Table, stdout: W) -> std::io::Result<()> {
    let shaped = match config.layout {
        Layout::Long => table.clone(),
        Layout::Wide => table.wide(),
    };
    let write = |w: &mut dyn Write| match config.format {
        Format::Csv => write_csv(&shaped, w),
        Format::Json => write_json(&shaped, w),
    };
    match &config.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            write(&mut f)?;
            f.flush()?;
            let mut s = std::io::BufWriter::new(std::fs::File::create(sidecar_path(path))?);
            serde_json::to_writer_pretty(&mut s, &sidecar(config, &shaped))?;
            writeln!(s)?;
            s.flush()
        }
        None => {
            let mut w = stdout;
            write(&mut w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_digits() {
        assert_eq!(Cell::Num(0.1).csv(), "1.0000000000000001e-1");
        let x = 1.0 / 3.0;
        assert_eq!(Cell::Num(x).csv().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn pivot() {
        let mut t = Table::new(&["n", "state", "value"]);
        t.key_columns = 1;
        t.series_columns = vec![1];
        for n in 1..3 {
            for s in ["a", "b"] {
                t.rows.push(vec![Cell::Int(n), Cell::Text(s.into()), Cell::Num(n as f64)]);
            }
        }
        let w = t.wide();
        assert_eq!(w.columns, vec!["n", "state=a", "state=b"]);
        assert_eq!(w.rows.len(), 2);
        let mut buf = Vec::new();
        write_csv(&w, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,state=a,state=b\n1,"));
    }
}
