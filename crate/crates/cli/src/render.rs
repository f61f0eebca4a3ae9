//! JSON, CSV and plain-text output.

use anyhow::Result;
use serde_json::Value;

use crate::args::Format;
use crate::record::{Record, Status};

/// Which table a CSV export contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsvView {
    Margins,
    Results,
}

pub fn render(records: &[Record], format: Format, view: CsvView) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(records)? + "\n"),
        Format::Csv => csv_text(records, view),
        Format::Human => Ok(human(records)),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn at_string(r: &crate::record::MarginRow) -> String {
    r.at.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn csv_text(records: &[Record], view: CsvView) -> Result<String> {
    let mut w = writer();
    match view {
        CsvView::Margins => {
            w.write_record(["id", "label", "at", "lo", "hi", "kind", "threshold", "verdict"])?;
            for rec in records {
                for m in &rec.margins {
                    w.write_record([
                        rec.id.clone(),
                        m.label.clone(),
                        at_string(m),
                        opt(m.lo),
                        opt(m.hi),
                        m.kind.clone(),
                        opt(m.threshold),
                        status(m.verdict).to_string(),
                    ])?;
                }
            }
        }
        CsvView::Results => {
            let mut header_done = false;
            for rec in records {
                let Some(t) = &rec.results else { continue };
                if !header_done {
                    w.write_record(&t.columns)?;
                    header_done = true;
                }
                for row in &t.rows {
                    w.write_record(row.iter().map(cell))?;
                }
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Verified => "verified",
        Status::Violated => "violated",
        Status::Inconclusive => "inconclusive",
        Status::Computed => "computed",
    }
}

fn human(records: &[Record]) -> String {
    let mut out = String::new();
    for rec in records {
        let mut head = format!("{}: {}", rec.id, status(rec.verdict).to_uppercase());
        if !rec.margins.is_empty() {
            head += &format!(" ({} margins)", rec.margins.len());
        }
        if let Some(ms) = rec.runtime_ms {
            head += &format!(" in {ms} ms");
        }
        out += &head;
        out.push('\n');
        let worst = rec
            .margins
            .iter()
            .filter(|m| m.kind == "positive" || m.kind == "slack")
            .filter_map(|m| Some((m, m.lo? + m.threshold.unwrap_or(0.0))))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((m, _)) = worst {
            out += &format!("  tightest: {} at [{}] lo = {:.6e}\n", m.label, at_string(m), m.lo.unwrap_or(f64::NAN));
        }
        for m in rec.margins.iter().filter(|m| m.verdict != Status::Verified) {
            out += &format!(
                "  {}: {} at [{}] in [{}, {}]\n",
                status(m.verdict),
                m.label,
                at_string(m),
                opt(m.lo),
                opt(m.hi)
            );
        }
        if let Some(t) = &rec.results {
            out += &table_text(&t.columns, &t.rows);
        }
        for n in &rec.notes {
            out += &format!("  note: {n}\n");
        }
    }
    out
}

fn table_text(columns: &[String], rows: &[Vec<Value>]) -> String {
    let fmt = |v: &Value| match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.12}"),
            _ => n.to_string(),
        },
        other => cell(other),
    };
    let body: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(fmt).collect()).collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(k, c)| body.iter().map(|r| r[k].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        format!("  {}\n", parts.join("  "))
    };
    let mut s = line(columns);
    for r in &body {
        s += &line(r);
    }
    s
}
