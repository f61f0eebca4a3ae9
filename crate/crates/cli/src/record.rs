//! Output records shared by every subcommand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use steinhaus::verifier::{Margin, MarginKind, Verdict, VerificationReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Violated,
    Inconclusive,
    Computed,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Verified => Status::Verified,
            Verdict::Violated => Status::Violated,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Paper,
    Derived,
    Extrapolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub label: String,
    pub at: BTreeMap<String, f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub kind: String,
    pub threshold: Option<f64>,
    pub verdict: Status,
}

impl From<&Margin> for MarginRow {
    fn from(m: &Margin) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        let (kind, threshold) = match m.kind {
            MarginKind::Positive => ("positive", None),
            MarginKind::Slack { slack } => ("slack", Some(slack)),
            MarginKind::Equality { tol } => ("equality", Some(tol)),
        };
        MarginRow {
            label: m.label.clone(),
            at: m.at.iter().cloned().collect(),
            lo: finite(m.value.lo()),
            hi: finite(m.value.hi()),
            kind: kind.into(),
            threshold,
            verdict: m.verdict().into(),
        }
    }
}

/// Column-oriented result table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub params: BTreeMap<String, Value>,
    pub margins: Vec<MarginRow>,
    pub verdict: Status,
    pub provenance: Source,
    pub runtime_ms: Option<u64>,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Record {
    pub fn computed(id: impl Into<String>, provenance: Source) -> Self {
        Record {
            id: id.into(),
            params: BTreeMap::new(),
            margins: Vec::new(),
            verdict: Status::Computed,
            provenance,
            runtime_ms: None,
            version: VERSION.into(),
            results: None,
            notes: Vec::new(),
        }
    }

    /// Merges reports of one lemma into a single record.
    pub fn from_reports(id: impl Into<String>, reports: &[VerificationReport]) -> Self {
        let verdict = reports.iter().fold(Verdict::Verified, |acc, r| acc.and(r.verdict));
        let mut rec = Record::computed(id, Source::Paper);
        rec.verdict = verdict.into();
        rec.margins = reports.iter().flat_map(|r| r.margins.iter().map(MarginRow::from)).collect();
        rec.notes = reports.iter().flat_map(|r| r.notes.iter().cloned()).collect();
        rec.params.insert("grid".into(), Value::Array(reports.iter().map(|r| Value::String(r.grid.clone())).collect()));
        let ms: u64 = reports.iter().filter_map(|r| r.runtime_ms).sum();
        rec.runtime_ms = Some(ms);
        rec
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(value).expect("serialisable parameter"));
        self
    }
}

/// 0 when everything verified or computed, 1 on a violation, 2 when inconclusive.
pub fn exit_code(records: &[Record]) -> i32 {
    if records.iter().any(|r| r.verdict == Status::Violated) {
        1
    } else if records.iter().any(|r| r.verdict == Status::Inconclusive) {
        2
    } else {
        0
    }
}

/// Reproducible form of a margin verdict for agreement checks.
pub fn headroom_row(label: &str, at: &[(&str, f64)], value: f64) -> MarginRow {
    MarginRow {
        label: label.into(),
        at: at.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        lo: Some(value),
        hi: Some(value),
        kind: "positive".into(),
        threshold: None,
        verdict: if value > 0.0 { Status::Verified } else { Status::Violated },
    }
}
