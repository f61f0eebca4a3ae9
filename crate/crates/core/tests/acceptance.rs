//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steinhaus::constants::{c_p, find_pstar, gaussian_norm, khinchin_constants, pair_norm};
use steinhaus::entropy::{renyi_gaussian, renyi_gaussian_numeric, renyi_profile, GridSpec, GAUSSIAN_SLACK};
use steinhaus::moments::{
    mc_negative_moment, pair_series_estimate, quad_negative_moment, CoefficientVector, MomentEstimate,
};
use steinhaus::verifier::*;
use steinhaus::Result;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn at(m: &Margin, key: &str) -> Option<f64> {
    m.at.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
}

fn table1() -> Outcome {
    let (r, table) = verify_fp3_table(&default_p_grid())?;
    let mut misses = Vec::new();
    for s in &table.segments {
        let (dm, dp) = (TABLE1_D_MINUS[s.j - 1], TABLE1_D_PLUS[s.j - 1]);
        if s.d_minus.lo() < dm {
            misses.push(format!("d-({}) = {:.6} < {dm}", s.j, s.d_minus.lo()));
        }
        if s.d_plus.lo() < dp {
            misses.push(format!("d+({}) = {:.6} < {dp}", s.j, s.d_plus.lo()));
        }
    }
    let small = table.small_p_margin.lo();
    let ok = misses.is_empty() && small > 1e-5 && r.verdict == Verdict::Verified;
    let detail = if misses.is_empty() { "all ten entries dominated".to_string() } else { misses.join(", ") };
    Ok((ok, format!("{detail}; small-p margin {small:.3e}; lemma {:?}", r.verdict)))
}

fn equality_case() -> Outcome {
    let a = CoefficientVector::equal(2)?;
    let mut worst: f64 = 0.0;
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let q = quad_negative_moment(&a, p, 1e-9)?;
        worst = worst.max((q.value - c_p(p)?).abs());
    }
    Ok((worst <= 1e-8, format!("max |E - c_p| = {worst:.2e}")))
}

fn master_sweep() -> Outcome {
    let r = verify_psi_master(&default_p_grid(), &default_s_grid())?;
    let eq: Vec<&Margin> = r.margins_labelled("psi2_minus_psi").filter(|m| at(m, "s") == Some(2.0)).collect();
    let eq_ok = !eq.is_empty() && eq.iter().all(|m| m.value.contains_zero());
    Ok((
        r.verdict == Verdict::Verified && eq_ok,
        format!("{} margins, verdict {:?}, {} equality enclosures at s = 2", r.margins.len(), r.verdict, eq.len()),
    ))
}

fn main_theorem() -> Outcome {
    let inst = random_unit_instances(50, 2..=6, DEFAULT_SEED)?;
    let mut verdict = Verdict::Verified;
    let mut cap = 0;
    for p in [0.1, 0.5, 0.9] {
        let r = verify_main_inequality(p, &inst)?;
        verdict = verdict.and(r.verdict);
        cap += r.margins_labelled("cap_form_margin").count();
    }
    Ok((
        verdict == Verdict::Verified && cap == 150,
        format!("150 instance-exponent pairs, {cap} normalized-form margins, verdict {verdict:?}"),
    ))
}

const DEFAULT_SEED: u64 = 20_240_601;

fn scaled_series(a: &CoefficientVector, p: f64) -> Result<MomentEstimate> {
    let (hi, lo) = (a.max(), a.min());
    let mut e = pair_series_estimate(p, (lo / hi).powi(2), 1e-12)?;
    let scale = hi.powf(-p);
    e.value *= scale;
    e.half_width *= scale;
    Ok(e)
}

fn oracle_triangle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut bad = Vec::new();
    for k in 0..20 {
        let t: f64 = rng.gen_range(0.05..std::f64::consts::FRAC_PI_4);
        let p: f64 = rng.gen_range(0.05..=0.45);
        let a = CoefficientVector::new(&[t.cos(), t.sin()])?;
        let q = quad_negative_moment(&a, p, 1e-8)?;
        let m = mc_negative_moment(&a, p, 1_000_000, DEFAULT_SEED + k)?;
        let s = scaled_series(&a, p)?;
        if !(q.agrees_with(&m) && q.agrees_with(&s) && m.agrees_with(&s)) {
            bad.push(format!("instance {k} (p = {p:.3})"));
        }
    }
    let detail = if bad.is_empty() { "20 of 20 instances agree pairwise".to_string() } else { bad.join(", ") };
    Ok((bad.is_empty(), detail))
}

fn up_gp() -> Outcome {
    let r = verify_up_le_gp(&default_p_grid())?;
    let ends: Vec<&Margin> = r.margins_labelled("tangent_endpoint").collect();
    let e0 = ends.iter().find(|m| at(m, "p") == Some(0.0)).map(|m| m.value.lo());
    let e1 = ends.iter().find(|m| at(m, "p") == Some(1.0)).map(|m| m.value.lo());
    let ends_ok = e0.is_some_and(|v| v >= 0.4) && e1.is_some_and(|v| v >= 0.3);
    let mut spots = true;
    for p in [0.1, 0.5, 0.9] {
        for s in [3.0, 5.0, 10.0] {
            spots &= u_p_enclosure(p, s)?.hi() <= g_p_enclosure(p, s)?.lo();
        }
    }
    Ok((
        r.verdict == Verdict::Verified && ends_ok && spots,
        format!(
            "endpoints {:.4} / {:.4}, spot checks {}, verdict {:?}",
            e0.unwrap_or(f64::NAN),
            e1.unwrap_or(f64::NAN),
            if spots { "hold" } else { "fail" },
            r.verdict
        ),
    ))
}

fn d_suite() -> Outcome {
    let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
    let r = verify_d_logconvex(&grid)?;
    let mut lower_ok = true;
    for k in 1..=500 {
        lower_ok &= lower_bound_second_derivative(k as f64 / 1000.0)?.lo() > 0.0;
    }
    let end = lower_bound_second_derivative(0.5)?;
    let closed = 6.0 - std::f64::consts::PI.powi(2) / 2.0;
    let ok = r.verdict == Verdict::Verified && lower_ok && end.contains(closed);
    Ok((
        ok,
        format!(
            "verdict {:?}, lower bound positive {lower_ok}, endpoint [{:.12}, {:.12}]",
            r.verdict,
            end.lo(),
            end.hi()
        ),
    ))
}

fn concavity() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for p in [0.1, 0.5, 0.9] {
        let r = verify_extended_concavity(p, 10_000, DEFAULT_SEED)?;
        ok &= r.verdict == Verdict::Verified;
        for m in &r.margins {
            if matches!(m.kind, MarginKind::Slack { .. }) {
                worst = worst.min(m.value.lo());
            }
        }
        ok &= r.margins_labelled("equal_pair").all(|m| m.value.contains_zero());
    }
    ok &= worst >= -1e-12;
    Ok((ok, format!("worst margin {worst:.3e}")))
}

fn renyi() -> Outcome {
    let ps = [0.25, 0.5, 0.75, 1.0];
    let mut prev = [f64::INFINITY; 4];
    let (mut dominated, mut decreasing) = (true, true);
    for n in [2, 4, 8, 16] {
        let hs = renyi_profile(&CoefficientVector::equal(n)?, &ps, GridSpec::default())?;
        for (k, (&p, h)) in ps.iter().zip(hs).enumerate() {
            let gap = renyi_gaussian(p)? - h;
            dominated &= gap > -GAUSSIAN_SLACK;
            decreasing &= gap < prev[k];
            prev[k] = gap;
        }
    }
    let plane = (renyi_gaussian_numeric(0.5)? - renyi_gaussian(0.5)?).abs();
    Ok((
        dominated && decreasing && plane <= 1e-6,
        format!("dominated {dominated}, gap decreasing {decreasing}, plane integral error {plane:.2e}, n = 16 gaps {prev:.4?}"),
    ))
}

fn constants() -> Outcome {
    let pstar = find_pstar(1e-14)?;
    let j1 = (pair_norm(pstar)? - gaussian_norm(pstar)?).abs();
    let eps = 1e-10;
    let a = |p: f64| khinchin_constants(p).map(|k| k.a_p);
    let b = |p: f64| khinchin_constants(p).map(|k| k.b_p);
    let jumps = [
        (a(pstar - eps)? - a(pstar + eps)?).abs(),
        (a(2.0 - eps)? - a(2.0 + eps)?).abs(),
        (b(2.0 - eps)? - b(2.0 + eps)?).abs(),
        j1,
    ];
    let worst = jumps.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 1e-8 && pstar > 0.47 && pstar < 0.49, format!("p* = {pstar:.10}, largest jump {worst:.2e}")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("published table reproduction", Duration::from_secs(60), table1),
        ("equality-case exactness", Duration::from_secs(5), equality_case),
        ("master lemma sweep", Duration::from_secs(600), master_sweep),
        ("main theorem property suite", Duration::from_secs(120), main_theorem),
        ("oracle triangle", Duration::from_secs(120), oracle_triangle),
        ("upper tangent proof path", Duration::from_secs(10), up_gp),
        ("D(p) suite", Duration::from_secs(10), d_suite),
        ("extended concavity", Duration::from_secs(5), concavity),
        ("Renyi entropy bound", Duration::from_secs(300), renyi),
        ("constants continuity", Duration::from_secs(5), constants),
    ];
    let mut failed = 0;
    for (k, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, d)) => (ok && took <= *budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += (!ok) as usize;
        println!(
            "criterion {:>2} {}: {name}: {detail} ({:.2} s, budget {} s)",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
