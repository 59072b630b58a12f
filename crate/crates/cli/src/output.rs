//! CSV / JSON emission and companion gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => Value::String(format_float(*v)),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// A data set: metadata plus rows under fixed column names.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub config: Vec<(&'static str, Cell)>,
    pub summary: Vec<(&'static str, Cell)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.config.iter().chain(self.summary.iter()) {
            let _ = writeln!(out, "# {k}={}", v.csv());
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let section = |pairs: &[(&'static str, Cell)]| {
            Value::Object(
                pairs
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.json()))
                    .collect::<Map<_, _>>(),
            )
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "config": section(&self.config),
            "summary": section(&self.summary),
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PlotKind {
    Curve,
    Nopt,
    Dist,
}

pub fn plot_script(kind: PlotKind, data_file: &str, image_file: &str) -> String {
    let head = format!(
        "# gnuplot script; render with: gnuplot <this file>\n\
         set datafile separator ','\n\
         set datafile missing 'none'\n\
         set key autotitle columnhead\n\
         set terminal pngcairo size 900,600\n\
         set output '{image_file}'\n"
    );
    let body = match kind {
        PlotKind::Curve => format!(
            "set logscale xy\n\
             set xlabel 'input photon number N'\n\
             set ylabel 'minimum detectable phase'\n\
             plot '{data_file}' using 1:2 with lines lw 2, \\\n     \
             '' using 1:3 with lines dt 3, \\\n     \
             '' using 1:4 with lines dt 2\n"
        ),
        PlotKind::Nopt => format!(
            "set logscale xy\n\
             set xlabel 'loss L'\n\
             set ylabel 'optimal photon number'\n\
             plot '{data_file}' using 1:2 with linespoints pt 7\n"
        ),
        PlotKind::Dist => format!(
            "set xrange [0:2*pi]\n\
             set xlabel 'phase estimate'\n\
             set ylabel 'P'\n\
             plot '{data_file}' using 1:2 with lines lw 2\n"
        ),
    };
    head + &body
}

/// Writes the rendered table to `out` (stdout when `None`). CSV files get a
/// `.gp` script beside them; returns its path.
pub fn emit(
    table: &Table,
    format: Format,
    out: Option<&Path>,
    kind: PlotKind,
) -> io::Result<Option<PathBuf>> {
    let text = table.render(format);
    let Some(path) = out else {
        io::stdout().lock().write_all(text.as_bytes())?;
        return Ok(None);
    };
    fs::write(path, text)?;
    if format != Format::Csv {
        return Ok(None);
    }
    let data_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let script = path.with_extension("gp");
    let image = path.with_extension("png");
    let image_name = image
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    fs::write(&script, plot_script(kind, &data_name, &image_name))?;
    Ok(Some(script))
}
