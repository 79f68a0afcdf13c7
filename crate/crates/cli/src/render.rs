//! Output rendering. All three formats are deterministic byte-for-byte for
//! a given input; CSV never needs quoting because no emitted field contains
//! a comma or newline.

use std::fmt::Display;

use modp_foliations::case::OutputFormat;
use serde::Serialize;

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize infallibly")
}

pub fn join<T: Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    let mut out = String::new();
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        out.push_str(&item.to_string());
    }
    out
}

pub fn csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Space-aligned table with a header line.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let render_line = |cells: Vec<&str>, out: &mut String| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            if i + 1 == widths.len() {
                out.push_str(cell);
            } else {
                out.push_str(&format!("{cell:<w$}"));
            }
        }
        out.push('\n');
    };
    render_line(headers.to_vec(), &mut out);
    for row in rows {
        render_line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// Key/value report in the chosen format. Table mode prints aligned pairs;
/// CSV mode emits a key,value header.
pub fn print_pairs(rows: &[(String, String)], format: OutputFormat) {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(k, v)| vec![k.clone(), v.clone()])
        .collect();
    match format {
        OutputFormat::Csv => print!("{}", csv(&["key", "value"], &cells)),
        _ => print!("{}", table(&["key", "value"], &cells)),
    }
}
