//! Subcommand implementations.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use steinhaus::constants::{
    c_p_enclosure, d_func_enclosure, find_pstar, kappa_p_enclosure, khinchin_constants, psi_2_enclosure, Provenance,
};
use steinhaus::entropy::{renyi_gaussian, renyi_profile, verify_renyi_upper_with, GridSpec};
use steinhaus::interval::Enclosure;
use steinhaus::moments::{
    mc_negative_moment, pair_series_estimate, psi_func, quad_negative_moment, CoefficientVector, MomentEstimate,
};
use steinhaus::verifier::*;

use crate::args::*;
use crate::record::{headroom_row, MarginRow, Record, Source, Status, Table};

/// Finite numbers as JSON numbers; infinities as the strings `inf` / `-inf`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn stepped(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        bail!("invalid range {min}..{max} with step {step}");
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    if n > 1_000_000 {
        bail!("range {min}..{max} with step {step} has too many points");
    }
    Ok((0..n).map(|k| round12(min + k as f64 * step)).collect())
}

/// A grid from an explicit list, a range, or the supplied default range.
fn grid(
    list: &Option<Vec<f64>>,
    range: (Option<f64>, Option<f64>, Option<f64>),
    default: (f64, f64, f64),
    refine: u32,
) -> Result<Vec<f64>> {
    if let Some(v) = list {
        if v.is_empty() {
            bail!("empty value list");
        }
        return Ok(v.clone());
    }
    let min = range.0.unwrap_or(default.0);
    let max = range.1.unwrap_or(default.1);
    let step = range.2.unwrap_or(default.2) / 2f64.powi(refine as i32);
    stepped(min, max, step)
}

fn p_grid(g: &GridArgs, default: (f64, f64, f64)) -> Result<Vec<f64>> {
    grid(&g.p, (g.p_min, g.p_max, g.p_step), default, g.refine)
}

fn p_list(g: &GridArgs, default: &[f64]) -> Result<Vec<f64>> {
    if g.p.is_none() && g.p_min.is_none() && g.p_max.is_none() && g.p_step.is_none() {
        return Ok(default.to_vec());
    }
    p_grid(g, (0.1, 0.9, 0.4))
}

fn s_grid(g: &GridArgs, default: (f64, f64, f64)) -> Result<Vec<f64>> {
    grid(&g.s, (g.s_min, g.s_max, g.s_step), default, g.refine)
}

const MAIN_P: (f64, f64, f64) = (0.01, 0.99, 0.01);
const MAIN_S: (f64, f64, f64) = (2.0, 50.0, 0.25);
const SPOT_P: [f64; 3] = [0.1, 0.5, 0.9];

fn fp3_config(bounds: Bounds) -> Fp3Config {
    let form = match bounds {
        Bounds::Tight => BoundForm::Tight,
        Bounds::Displayed => BoundForm::Displayed,
    };
    Fp3Config { form, ..Fp3Config::default() }
}

fn segment_table(table: &Fp3Table) -> Table {
    let mut t =
        Table::new(&["j", "u_lo", "u_hi", "d_minus", "d_plus", "published_d_minus", "published_d_plus", "dominates"]);
    for s in &table.segments {
        let opt = |x: Option<f64>| x.map_or(Value::Null, num);
        t.push(vec![
            json!(s.j),
            num(s.u_lo),
            num(s.u_hi),
            num(s.d_minus.lo()),
            num(s.d_plus.lo()),
            opt(s.published_d_minus),
            opt(s.published_d_plus),
            s.dominates.map_or(Value::Null, Value::Bool),
        ]);
    }
    t
}

fn node_values(table: &Fp3Table) -> Value {
    Value::Array(
        table
            .breakdowns
            .iter()
            .map(|b| {
                json!({
                    "p": b.p,
                    "b1": [b.b1.lo(), b.b1.hi()],
                    "b2": [b.b2.lo(), b.b2.hi()],
                    "b3": [b.b3.lo(), b.b3.hi()],
                    "b4": [b.b4.lo(), b.b4.hi()],
                    "l": [b.l.lo(), b.l.hi()],
                    "r": b.r.map(|r| vec![r.lo(), r.hi()]),
                })
            })
            .collect(),
    )
}

fn fp3_record(id: &str, p: &[f64], bounds: Bounds) -> Result<Record> {
    let cfg = fp3_config(bounds);
    let (report, table) = verify_fp3_table_with(p, &cfg)?;
    let mut rec = Record::from_reports(id, &[report])
        .param("bounds", format!("{bounds:?}").to_lowercase())
        .param("nodes", cfg.nodes)
        .param("m", cfg.m)
        .param("l_bound", cfg.l_bound)
        .param("tangent_nodes", &cfg.u)
        .param("small_p_margin", table.small_p_margin.lo())
        .param("dominates_table", table.dominates_table());
    rec.params.insert("node_bounds".into(), node_values(&table));
    rec.results = Some(segment_table(&table));
    Ok(rec)
}

fn parse_vectors(s: &str) -> Result<Vec<CoefficientVector>> {
    s.split(';')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            let a = v
                .split(',')
                .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad coefficient `{x}`")))
                .collect::<Result<Vec<f64>>>()?;
            Ok(CoefficientVector::normalized(&a)?)
        })
        .collect()
}

fn verify_one(lemma: LemmaId, a: &VerifyArgs) -> Result<Record> {
    let g = &a.grid;
    let id = format!("verify/{}", lemma.cli_name());
    let rec = match lemma {
        LemmaId::FpLeUp => Record::from_reports(id, &[verify_fp_le_up(&p_grid(g, MAIN_P)?, &s_grid(g, MAIN_S)?)?]),
        LemmaId::UpLeGp => Record::from_reports(id, &[verify_up_le_gp(&p_grid(g, MAIN_P)?)?]),
        LemmaId::Fp3Table => fp3_record(&id, &p_grid(g, MAIN_P)?, a.bounds)?,
        LemmaId::DLogconvex => Record::from_reports(id, &[verify_d_logconvex(&p_grid(g, (0.001, 0.999, 0.001))?)?]),
        LemmaId::ExtConcavity => {
            let reports = p_list(g, &SPOT_P)?
                .iter()
                .map(|&p| verify_extended_concavity(p, a.trials, a.seed))
                .collect::<steinhaus::Result<Vec<_>>>()?;
            Record::from_reports(id, &reports).param("trials", a.trials).param("seed", a.seed)
        }
        LemmaId::BaseCase => {
            let xs = stepped(0.0, 1.0, 0.01 / 2f64.powi(g.refine as i32))?;
            let reports =
                p_list(g, &SPOT_P)?.iter().map(|&p| verify_base_case(p, &xs)).collect::<steinhaus::Result<Vec<_>>>()?;
            Record::from_reports(id, &reports)
        }
        LemmaId::MainInequality => {
            if a.max_n < 2 {
                bail!("--max-n must be at least 2");
            }
            let inst = random_unit_instances(a.instances, 2..=a.max_n, a.seed)?;
            let reports = p_list(g, &SPOT_P)?
                .iter()
                .map(|&p| verify_main_inequality(p, &inst))
                .collect::<steinhaus::Result<Vec<_>>>()?;
            Record::from_reports(id, &reports)
                .param("instances", a.instances)
                .param("max_n", a.max_n)
                .param("seed", a.seed)
        }
        LemmaId::LBound => Record::from_reports(id, &[verify_l_bound()?]),
        LemmaId::HolderChain => {
            let ss = s_grid(g, (2.0, 3.0, 0.05))?;
            let reports = p_list(g, &SPOT_P)?
                .iter()
                .map(|&p| verify_holder_chain(p, &ss))
                .collect::<steinhaus::Result<Vec<_>>>()?;
            Record::from_reports(id, &reports)
        }
        LemmaId::PsiMaster => Record::from_reports(id, &[verify_psi_master(&p_grid(g, MAIN_P)?, &s_grid(g, MAIN_S)?)?]),
        LemmaId::RenyiUpper => {
            let vectors = match &a.coeffs {
                Some(s) => parse_vectors(s)?,
                None => [2, 4, 8, 16].iter().map(|&n| CoefficientVector::equal(n)).collect::<steinhaus::Result<_>>()?,
            };
            let ps = p_list(g, &[0.25, 0.5, 0.75, 1.0])?;
            let vs: Vec<Vec<f64>> = vectors.iter().map(|v| v.as_slice().to_vec()).collect();
            Record::from_reports(id, &[verify_renyi_upper_with(&vectors, &ps, GridSpec::default())?])
                .param("coefficients", vs)
        }
    };
    Ok(rec)
}

pub fn verify(a: &VerifyArgs) -> Result<Vec<Record>> {
    let lemmas: Vec<LemmaId> = match a.lemma {
        LemmaArg::All => LemmaId::ALL.to_vec(),
        ref l => vec![lemma_id(l)],
    };
    lemmas.into_iter().map(|l| verify_one(l, a)).collect()
}

fn lemma_id(l: &LemmaArg) -> LemmaId {
    match l {
        LemmaArg::FpLeUp => LemmaId::FpLeUp,
        LemmaArg::UpLeGp => LemmaId::UpLeGp,
        LemmaArg::Fp3Table => LemmaId::Fp3Table,
        LemmaArg::DLogconvex => LemmaId::DLogconvex,
        LemmaArg::ExtConcavity => LemmaId::ExtConcavity,
        LemmaArg::BaseCase => LemmaId::BaseCase,
        LemmaArg::MainInequality => LemmaId::MainInequality,
        LemmaArg::LBound => LemmaId::LBound,
        LemmaArg::HolderChain => LemmaId::HolderChain,
        LemmaArg::PsiMaster => LemmaId::PsiMaster,
        LemmaArg::RenyiUpper => LemmaId::RenyiUpper,
        LemmaArg::All => unreachable!("expanded by the caller"),
    }
}

pub fn table1(a: &Table1Args) -> Result<Vec<Record>> {
    let p: Vec<f64> = stepped(MAIN_P.0, MAIN_P.1, MAIN_P.2)?;
    let mut rec = fp3_record("table1", &p, a.bounds)?;
    rec.margins.retain(|m| m.label == "d_minus" || m.label == "d_plus" || m.verdict != Status::Verified);
    let (_, table) = verify_fp3_table_with(&[0.5], &fp3_config(a.bounds))?;
    for seg in &table.segments {
        let at = [("j", seg.j as f64)];
        let pairs = [
            ("d_minus_vs_published", seg.d_minus, seg.published_d_minus),
            ("d_plus_vs_published", seg.d_plus, seg.published_d_plus),
        ];
        for (label, d, published) in pairs {
            if let Some(published) = published {
                let m = Margin::slack(label, &at, Enclosure::new(d.lo() - published, d.hi() - published), TABLE1_SLACK);
                rec.margins.push(MarginRow::from(&m));
            }
        }
    }
    rec.verdict = rec.margins.iter().fold(Status::Verified, |acc, m| worse(acc, m.verdict));
    Ok(vec![rec])
}

fn worse(a: Status, b: Status) -> Status {
    let rank = |s: Status| match s {
        Status::Violated => 3,
        Status::Inconclusive => 2,
        _ => 1,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn source(p: Provenance) -> Source {
    match p {
        Provenance::Paper => Source::Paper,
        Provenance::Derived => Source::Derived,
        Provenance::Extrapolated => Source::Extrapolated,
    }
}

pub fn constant(a: &ConstantArgs) -> Result<Vec<Record>> {
    let need_p = || a.p.context("--p is required for this constant");
    let (label, p, value, enc, prov) = match a.name {
        ConstantName::Pstar => {
            let v = find_pstar(1e-14)?;
            ("p_star", None, v, None, Source::Derived)
        }
        ConstantName::Ap | ConstantName::Bp => {
            let p = need_p()?;
            let k = khinchin_constants(p)?;
            if a.name == ConstantName::Ap {
                ("A_p", Some(p), k.a_p, None, source(k.a_provenance))
            } else {
                ("B_p", Some(p), k.b_p, None, source(k.b_provenance))
            }
        }
        name => {
            let p = need_p()?;
            let (label, e): (&str, Enclosure) = match name {
                ConstantName::Cp => ("C_p", c_p_enclosure(p)?),
                ConstantName::Kappa => ("kappa_p", kappa_p_enclosure(p)?),
                ConstantName::Psi2 => ("Psi_p(2)", psi_2_enclosure(p)?),
                ConstantName::D => ("D", d_func_enclosure(p)?),
                _ => unreachable!("handled above"),
            };
            (label, Some(p), e.mid(), Some(e), Source::Paper)
        }
    };
    let mut rec = Record::computed("constant", prov).param("name", label);
    if let Some(p) = p {
        rec = rec.param("p", p);
    }
    let mut t = Table::new(&["name", "p", "value", "lo", "hi"]);
    t.push(vec![
        json!(label),
        p.map_or(Value::Null, num),
        num(value),
        enc.map_or(Value::Null, |e| num(e.lo())),
        enc.map_or(Value::Null, |e| num(e.hi())),
    ]);
    rec.results = Some(t);
    Ok(vec![rec])
}

fn read_coeffs(a: &MomentArgs) -> Result<Vec<f64>> {
    if let Some(c) = &a.coeffs {
        return Ok(c.clone());
    }
    let path = a.coeffs_file.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("bad coefficient `{s}`")))
        .collect()
}

/// Two-term moments from the series in `x = (a_min / a_max)^2`.
fn series_moment(a: &CoefficientVector, p: f64, tol: f64) -> Result<MomentEstimate> {
    if a.len() != 2 {
        bail!("the pair series needs exactly two coefficients, got {}", a.len());
    }
    let (hi, lo) = (a.max(), a.min());
    let mut e = pair_series_estimate(p, (lo / hi).powi(2), tol)?;
    let scale = hi.powf(-p);
    e.value *= scale;
    e.half_width *= scale;
    Ok(e)
}

pub fn moment(a: &MomentArgs) -> Result<Vec<Record>> {
    let raw = read_coeffs(a)?;
    let v = if a.normalize { CoefficientVector::normalized(&raw)? } else { CoefficientVector::new(&raw)? };
    if !(a.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let methods: Vec<MethodArg> = match a.method {
        MethodArg::All if v.len() == 2 => vec![MethodArg::Quad, MethodArg::Mc, MethodArg::Series],
        MethodArg::All => vec![MethodArg::Quad, MethodArg::Mc],
        m => vec![m],
    };
    let mut estimates = Vec::new();
    let mut notes = Vec::new();
    for m in &methods {
        let e = match m {
            MethodArg::Quad => quad_negative_moment(&v, a.p, a.tol),
            MethodArg::Mc => mc_negative_moment(&v, a.p, a.samples, a.seed),
            MethodArg::Series => series_moment(&v, a.p, a.tol).map_err(|e| steinhaus::Error::Domain(e.to_string())),
            MethodArg::All => unreachable!("expanded above"),
        };
        match e {
            Ok(e) => estimates.push(e),
            Err(e) if a.method == MethodArg::All => notes.push(format!("{m:?} skipped: {e}").to_lowercase()),
            Err(e) => return Err(e.into()),
        }
    }
    let mut rec = Record::computed("moment", Source::Derived)
        .param("coefficients", v.as_slice())
        .param("p", a.p)
        .param("tol", a.tol);
    if methods.contains(&MethodArg::Mc) {
        rec = rec.param("samples", a.samples).param("seed", a.seed);
    }
    let mut t = Table::new(&["method", "value", "half_width", "meta", "kurtosis"]);
    for e in &estimates {
        t.push(vec![
            serde_json::to_value(e.method)?,
            num(e.value),
            num(e.half_width),
            json!(e.meta),
            e.warning.map_or(Value::Null, |w| num(w.kurtosis)),
        ]);
    }
    rec.results = Some(t);
    rec.notes = notes;
    if estimates.len() > 1 {
        let mut rows: Vec<MarginRow> = Vec::new();
        for i in 0..estimates.len() {
            for j in i + 1..estimates.len() {
                let (x, y) = (&estimates[i], &estimates[j]);
                let slack = x.half_width + y.half_width - (x.value - y.value).abs();
                rows.push(headroom_row("agreement_headroom", &[("first", i as f64), ("second", j as f64)], slack));
            }
        }
        rec.verdict =
            if rows.iter().all(|r| r.lo.is_some_and(|v| v > 0.0)) { Status::Verified } else { Status::Violated };
        rec.margins = rows;
    }
    Ok(vec![rec])
}

pub fn sweep(a: &SweepArgs) -> Result<Vec<Record>> {
    let g = &a.grid;
    let mut rec;
    match a.kind {
        SweepKind::Constants => {
            let ps = p_grid(g, (-0.9, 4.0, 0.01))?;
            let rows =
                ps.par_iter().map(|&p| Ok((p, khinchin_constants(p)?))).collect::<steinhaus::Result<Vec<_>>>()?;
            let mut t = Table::new(&["p", "A_p", "B_p", "a_regime", "b_provenance"]);
            for (p, k) in rows {
                t.push(vec![
                    num(p),
                    num(k.a_p),
                    num(k.b_p),
                    serde_json::to_value(k.a_regime)?,
                    serde_json::to_value(k.b_provenance)?,
                ]);
            }
            rec = Record::computed("sweep/constants", Source::Paper);
            rec.results = Some(t);
        }
        SweepKind::Psi => {
            if !(a.tol > 0.0) {
                bail!("--tol must be positive");
            }
            let ps = p_list(g, &SPOT_P)?;
            let ss = s_grid(g, MAIN_S)?;
            let pairs: Vec<(f64, f64)> = ps.iter().flat_map(|&p| ss.iter().map(move |&s| (p, s))).collect();
            let vals = pairs.par_iter().map(|&(p, s)| psi_point(p, s, a.tol)).collect::<steinhaus::Result<Vec<_>>>()?;
            let loosened: Vec<String> = pairs
                .iter()
                .zip(&vals)
                .filter(|(_, (_, t))| *t > a.tol)
                .map(|((p, s), (_, t))| format!("p = {p}, s = {s} certified at width {t:e}"))
                .collect();
            let vals: Vec<Enclosure> = vals.into_iter().map(|(v, _)| v).collect();
            let mut t = Table::new(&["p", "s", "psi_lo", "psi_hi"]);
            for ((p, s), v) in pairs.iter().zip(vals) {
                t.push(vec![num(*p), num(*s), num(v.lo()), num(v.hi())]);
            }
            rec = Record::computed("sweep/psi", Source::Derived).param("tol", a.tol);
            rec.notes = loosened;
            rec.results = Some(t);
        }
    }
    Ok(vec![rec])
}

/// `Psi_p(s)` and the width actually used; `s = 2` uses the closed form.
fn psi_point(p: f64, s: f64, tol: f64) -> steinhaus::Result<(Enclosure, f64)> {
    if s == 2.0 {
        return Ok((psi_2_enclosure(p)?, tol));
    }
    let mut t = tol;
    loop {
        match psi_func(p, s, t) {
            Ok(v) => return Ok((v, t)),
            Err(steinhaus::Error::Convergence(_)) if t < 1e-3 => t *= 10.0,
            Err(e) => return Err(e),
        }
    }
}

pub fn entropy(a: &EntropyArgs) -> Result<Vec<Record>> {
    let v = match (&a.coeffs, a.equal) {
        (Some(c), None) => CoefficientVector::normalized(c)?,
        (None, Some(n)) => CoefficientVector::equal(n)?,
        _ => bail!("give either --coeffs or --equal"),
    };
    if a.p.is_empty() {
        bail!("empty p list");
    }
    let spec = GridSpec { points: a.points, ..GridSpec::default() };
    let hs = renyi_profile(&v, &a.p, spec)?;
    let mut t = Table::new(&["p", "h_steinhaus", "h_gaussian", "gap"]);
    for (&p, h) in a.p.iter().zip(hs) {
        let g = renyi_gaussian(p)?;
        t.push(vec![num(p), num(h), num(g), num(g - h)]);
    }
    let mut rec =
        Record::computed("entropy", Source::Derived).param("coefficients", v.as_slice()).param("points", a.points);
    if v.len() > 2 {
        let d = steinhaus::entropy::radial_density(&v, spec)?;
        rec = rec.param("mass_error", d.mass_error).param("second_moment", d.second_moment());
        rec.notes = d.notes;
    }
    rec.results = Some(t);
    Ok(vec![rec])
}
