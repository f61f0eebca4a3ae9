//! Machine re-verification of the numerical steps behind the sharp bound.
//!
//! Every check produces a [`VerificationReport`]: a list of [`Margin`]s, each
//! an [`Enclosure`] of a quantity that must be positive (or zero, for the
//! equality cases), and a verdict derived from them.

mod dfunc;
mod fp3;
mod holder;
mod induction;
mod upper;

pub use dfunc::{lower_bound_second_derivative, verify_d_logconvex};
pub use fp3::{
    l_bound_sup, verify_fp3_table, verify_fp3_table_with, verify_l_bound, BoundForm, Fp3Breakdown, Fp3Config,
    Fp3Segment, Fp3Table, TABLE1_D_MINUS, TABLE1_D_PLUS, TABLE1_SLACK,
};
pub use holder::{verify_holder_chain, verify_psi_master, F_EQUALITY_TOL};
pub use induction::{
    random_unit_instances, verify_base_case, verify_extended_concavity, verify_main_inequality, CONCAVITY_SLACK,
    QUAD_SLACK,
};
pub use upper::{
    g_p_enclosure, u_p_enclosure, up_gp_exact_s3, up_gp_relaxed_form, verify_fp_le_up, verify_up_le_gp, B0,
};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interval::Enclosure;
use crate::moments::{f_p_integral, f_p_integral_batch};

/// The verified statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaId {
    FpLeUp,
    UpLeGp,
    Fp3Table,
    DLogconvex,
    ExtConcavity,
    BaseCase,
    MainInequality,
    LBound,
    HolderChain,
    PsiMaster,
    RenyiUpper,
}

impl LemmaId {
    pub const ALL: [LemmaId; 11] = [
        LemmaId::FpLeUp,
        LemmaId::UpLeGp,
        LemmaId::Fp3Table,
        LemmaId::DLogconvex,
        LemmaId::ExtConcavity,
        LemmaId::BaseCase,
        LemmaId::MainInequality,
        LemmaId::LBound,
        LemmaId::HolderChain,
        LemmaId::PsiMaster,
        LemmaId::RenyiUpper,
    ];

    /// Kebab-case name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            LemmaId::FpLeUp => "fp-le-up",
            LemmaId::UpLeGp => "up-le-gp",
            LemmaId::Fp3Table => "fp3-table",
            LemmaId::DLogconvex => "d-logconvex",
            LemmaId::ExtConcavity => "ext-concavity",
            LemmaId::BaseCase => "base-case",
            LemmaId::MainInequality => "main-inequality",
            LemmaId::LBound => "l-bound",
            LemmaId::HolderChain => "holder-chain",
            LemmaId::PsiMaster => "psi-master",
            LemmaId::RenyiUpper => "renyi-upper",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        LemmaId::ALL
            .into_iter()
            .find(|l| l.cli_name() == norm)
            .ok_or_else(|| Error::Domain(format!("unknown lemma `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// The weaker of two verdicts: violated beats inconclusive beats verified.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Verified,
        }
    }
}

/// What a margin has to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginKind {
    /// Strictly positive: verified iff `lo > 0`, violated iff `hi < 0`.
    Positive,
    /// Nonnegative up to `slack`: verified iff `lo > -slack`, violated iff `hi < -slack`.
    Slack { slack: f64 },
    /// Zero: verified iff the enclosure contains 0 and has magnitude at most `tol`.
    Equality { tol: f64 },
}

/// One certified quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub label: String,
    /// Parameter values at which the margin was evaluated.
    pub at: Vec<(String, f64)>,
    pub value: Enclosure,
    #[serde(flatten)]
    pub kind: MarginKind,
}

impl Margin {
    pub fn positive(label: impl Into<String>, at: &[(&str, f64)], value: Enclosure) -> Self {
        Self::with_kind(label, at, value, MarginKind::Positive)
    }

    pub fn slack(label: impl Into<String>, at: &[(&str, f64)], value: Enclosure, slack: f64) -> Self {
        Self::with_kind(label, at, value, MarginKind::Slack { slack })
    }

    pub fn equality(label: impl Into<String>, at: &[(&str, f64)], value: Enclosure, tol: f64) -> Self {
        Self::with_kind(label, at, value, MarginKind::Equality { tol })
    }

    pub fn with_kind(label: impl Into<String>, at: &[(&str, f64)], value: Enclosure, kind: MarginKind) -> Self {
        Margin { label: label.into(), at: at.iter().map(|(k, v)| (k.to_string(), *v)).collect(), value, kind }
    }

    pub fn verdict(&self) -> Verdict {
        let v = &self.value;
        if v.lo().is_nan() || v.hi().is_nan() {
            return Verdict::Inconclusive;
        }
        match self.kind {
            MarginKind::Positive => {
                if v.lo() > 0.0 {
                    Verdict::Verified
                } else if v.hi() < 0.0 {
                    Verdict::Violated
                } else {
                    Verdict::Inconclusive
                }
            }
            MarginKind::Slack { slack } => {
                if v.lo() > -slack {
                    Verdict::Verified
                } else if v.hi() < -slack {
                    Verdict::Violated
                } else {
                    Verdict::Inconclusive
                }
            }
            MarginKind::Equality { tol } => {
                if v.lo() > tol || v.hi() < -tol {
                    Verdict::Violated
                } else if v.contains(0.0) && v.mag() <= tol {
                    Verdict::Verified
                } else {
                    Verdict::Inconclusive
                }
            }
        }
    }

    /// Distance of the lower end from failure; used to rank margins.
    pub fn headroom(&self) -> f64 {
        match self.kind {
            MarginKind::Positive => self.value.lo(),
            MarginKind::Slack { slack } => self.value.lo() + slack,
            MarginKind::Equality { tol } => tol - self.value.mag(),
        }
    }
}

/// Outcome of one verifier run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma_id: LemmaId,
    /// Human-readable description of the swept parameters.
    pub grid: String,
    pub margins: Vec<Margin>,
    pub verdict: Verdict,
    /// First margin proving a violation, if any.
    pub counterexample: Option<Margin>,
    /// Non-equality margin with the least headroom.
    pub worst: Option<Margin>,
    /// Reported observations that are not part of the verdict.
    pub notes: Vec<String>,
    /// Wall-clock time; `None` when timing is suppressed for reproducible output.
    pub runtime_ms: Option<u64>,
}

impl VerificationReport {
    pub(crate) fn new(
        lemma_id: LemmaId,
        grid: impl Into<String>,
        margins: Vec<Margin>,
        notes: Vec<String>,
        started: Instant,
    ) -> Self {
        let verdict = margins.iter().fold(Verdict::Verified, |acc, m| acc.and(m.verdict()));
        let counterexample = margins.iter().find(|m| m.verdict() == Verdict::Violated).cloned();
        let worst = margins
            .iter()
            .filter(|m| !matches!(m.kind, MarginKind::Equality { .. }))
            .min_by(|a, b| a.headroom().total_cmp(&b.headroom()))
            .cloned();
        VerificationReport {
            lemma_id,
            grid: grid.into(),
            margins,
            verdict,
            counterexample,
            worst,
            notes,
            runtime_ms: Some(started.elapsed().as_millis() as u64),
        }
    }

    /// Copy with `runtime_ms` cleared, for byte-identical output.
    /// Report over the given margins, without notes or timing.
    pub fn from_margins(lemma_id: LemmaId, grid: impl Into<String>, margins: Vec<Margin>) -> Self {
        Self::new(lemma_id, grid, margins, Vec::new(), Instant::now()).without_timing()
    }

    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = None;
        self
    }

    /// Margins with a given label.
    pub fn margins_labelled<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Margin> + 'a {
        self.margins.iter().filter(move |m| m.label == label)
    }
}

/// `p = 0.01, 0.02, ..., 0.99`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

/// `s = 2, 2.25, ..., 50`, which contains the special points 2 and 3.
pub fn default_s_grid() -> Vec<f64> {
    (0..=192).map(|k| 2.0 + 0.25 * k as f64).collect()
}

/// `[lo, hi]` in `n` equal steps, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    (0..=n).map(|k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 }).collect()
}

/// Tolerances tried for one certified evaluation before giving up.
pub(crate) const ESCALATION: [f64; 3] = [1e-4, 1e-6, 1e-8];

pub(crate) fn check_p_grid(ps: &[f64]) -> Result<()> {
    if ps.is_empty() {
        return domain("empty p grid");
    }
    if let Some(p) = ps.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return domain(format!("p grid must lie in (0, 1), got {p}"));
    }
    Ok(())
}

/// Certified `F_p(s)` for every `p`, escalating the width target through
/// [`ESCALATION`] for the points where `settled` is false.
pub(crate) fn certify_f(
    ps: &[f64],
    s: f64,
    settled: impl Fn(usize, Enclosure) -> bool,
) -> (Vec<Enclosure>, Vec<String>) {
    let mut out = vec![unknown(); ps.len()];
    let mut notes = Vec::new();
    let mut pending: Vec<usize> = (0..ps.len()).collect();
    for &tol in &ESCALATION {
        if pending.is_empty() {
            break;
        }
        let sub: Vec<f64> = pending.iter().map(|&i| ps[i]).collect();
        let vals = match f_p_integral_batch(&sub, s, tol) {
            Ok(v) => v.into_iter().map(Some).collect(),
            Err(_) => sub.iter().map(|&p| f_p_integral(p, s, tol).ok()).collect::<Vec<_>>(),
        };
        for (&i, v) in pending.iter().zip(vals) {
            match v {
                Some(e) => out[i] = out[i].intersect(&e).unwrap_or(e),
                None => {
                    if tol == ESCALATION[ESCALATION.len() - 1] || out[i].lo().is_infinite() {
                        notes.push(format!("F_p(s) at p = {}, s = {s}: no enclosure at width {tol:e}", ps[i]));
                    }
                }
            }
        }
        pending.retain(|&i| !settled(i, out[i]));
    }
    (out, notes)
}

/// An enclosure carrying no information, for failed evaluations.
pub(crate) fn unknown() -> Enclosure {
    Enclosure::new(f64::NEG_INFINITY, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_trichotomy() {
        let pos = Margin::positive("x", &[], Enclosure::new(1e-3, 2e-3));
        let neg = Margin::positive("x", &[], Enclosure::new(-2e-3, -1e-3));
        let amb = Margin::positive("x", &[], Enclosure::new(-1e-3, 1e-3));
        assert_eq!(pos.verdict(), Verdict::Verified);
        assert_eq!(neg.verdict(), Verdict::Violated);
        assert_eq!(amb.verdict(), Verdict::Inconclusive);
        let eq = Margin::equality("x", &[], Enclosure::new(-1e-12, 1e-12), 1e-8);
        assert_eq!(eq.verdict(), Verdict::Verified);
        let off = Margin::equality("x", &[], Enclosure::new(1e-6, 2e-6), 1e-8);
        assert_eq!(off.verdict(), Verdict::Violated);
        let sl = Margin::slack("x", &[], Enclosure::new(-1e-13, 0.0), 1e-12);
        assert_eq!(sl.verdict(), Verdict::Verified);
    }

    #[test]
    fn report_verdict_and_worst() {
        let ms = vec![
            Margin::positive("a", &[("p", 0.1)], Enclosure::new(0.5, 0.6)),
            Margin::positive("a", &[("p", 0.2)], Enclosure::new(0.1, 0.2)),
            Margin::equality("b", &[], Enclosure::new(-1e-15, 1e-15), 1e-9),
        ];
        let r = VerificationReport::new(LemmaId::BaseCase, "test", ms, vec![], Instant::now());
        assert_eq!(r.verdict, Verdict::Verified);
        assert_eq!(r.worst.unwrap().at[0].1, 0.2);
        assert!(r.counterexample.is_none());
    }

    #[test]
    fn lemma_names_round_trip() {
        for l in LemmaId::ALL {
            assert_eq!(l.cli_name().parse::<LemmaId>().unwrap(), l);
        }
        assert_eq!("FP3_TABLE".parse::<LemmaId>().unwrap(), LemmaId::Fp3Table);
        assert!("nope".parse::<LemmaId>().is_err());
        assert_eq!(serde_json::to_string(&LemmaId::Fp3Table).unwrap(), "\"FP3_TABLE\"");
    }

    #[test]
    fn default_grids() {
        let s = default_s_grid();
        assert_eq!(s.first(), Some(&2.0));
        assert_eq!(s.last(), Some(&50.0));
        assert!(s.contains(&3.0));
        assert_eq!(default_p_grid().len(), 99);
    }
}
