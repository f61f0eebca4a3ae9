use proptest::prelude::*;
use steinhaus::constants::c_p;
use steinhaus::interval::Enclosure;
use steinhaus::moments::CoefficientVector;
use steinhaus::verifier::*;

fn at(m: &Margin, key: &str) -> f64 {
    m.at.iter().find(|(k, _)| k == key).map(|(_, v)| *v).expect("coordinate present")
}

#[test]
fn fp_le_up_spot_points() {
    let r = verify_fp_le_up(&[0.01, 0.5], &[3.0]).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{r:?}");
    assert!(r.margins_labelled("u_minus_f").all(|m| m.value.lo() > 0.0));
    assert!(verify_fp_le_up(&[0.9], &[1.5]).is_err());
}

#[test]
fn up_le_gp_endpoints_and_spots() {
    let r = verify_up_le_gp(&default_p_grid()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.worst);
    let ends: Vec<&Margin> = r.margins_labelled("tangent_endpoint").collect();
    assert!(ends.iter().any(|m| at(m, "p") == 0.0 && m.value.lo() >= 0.4));
    assert!(ends.iter().any(|m| at(m, "p") == 1.0 && m.value.lo() >= 0.3));
    for s in [3.0, 10.0] {
        let g = g_p_enclosure(0.5, s).unwrap();
        let u = u_p_enclosure(0.5, s).unwrap();
        assert!(g.lo() > u.hi(), "s={s}");
    }
}

#[test]
fn fp3_table_margins() {
    let (r, table) = verify_fp3_table(&default_p_grid()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.worst);
    assert!(table.small_p_margin.lo() > 1e-5);
    let s1 = &table.segments[0];
    assert!(s1.d_minus.lo() >= 0.00017 && s1.d_plus.lo() >= 0.00017);
    let s5 = &table.segments[4];
    assert!(s5.d_minus.lo() >= 0.28 && s5.d_plus.lo() >= 0.7);
    assert_eq!(table.breakdowns.len(), 6);
    for b in &table.breakdowns {
        match b.r {
            Some(r) => assert!(r.lo() > b.l.hi(), "{b:?}"),
            None => assert_eq!(b.p, 1.0),
        }
    }
}

#[test]
fn fp3_tight_forms_dominate_all_but_one_entry() {
    let (_, table) = verify_fp3_table(&[0.1, 0.5, 0.9]).unwrap();
    for seg in &table.segments {
        assert!(seg.d_minus.lo() >= TABLE1_D_MINUS[seg.j - 1] - TABLE1_SLACK, "segment {}", seg.j);
        let plus_ok = seg.d_plus.lo() >= TABLE1_D_PLUS[seg.j - 1] - TABLE1_SLACK;
        assert_eq!(plus_ok, seg.j != 3, "segment {}", seg.j);
    }
    assert!(!table.dominates_table());
}

#[test]
fn fp3_displayed_forms_track_published_digits() {
    let cfg = Fp3Config { form: BoundForm::Displayed, ..Fp3Config::default() };
    let (_, table) = verify_fp3_table_with(&[0.1, 0.5, 0.9], &cfg).unwrap();
    let mut plus = TABLE1_D_PLUS;
    plus[2] = 0.006;
    for seg in &table.segments {
        let k = seg.j - 1;
        assert!((seg.d_minus.mid() / TABLE1_D_MINUS[k] - 1.0).abs() < 0.2, "segment {}", seg.j);
        assert!((seg.d_plus.mid() / plus[k] - 1.0).abs() < 0.2, "segment {}", seg.j);
    }
}

#[test]
fn fp3_config_overrides() {
    let low = Fp3Config { l_bound: 0.05, ..Fp3Config::default() };
    assert!(verify_fp3_table_with(&[0.5], &low).is_err());
    let high = Fp3Config { l_bound: 0.2, ..Fp3Config::default() };
    let (r, _) = verify_fp3_table_with(&[0.5], &high).unwrap();
    assert_ne!(r.verdict, Verdict::Violated);
}

#[test]
fn l_bound_report() {
    let r = verify_l_bound().unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    let cell = r.margins_labelled("argmax_cell_interior").next().unwrap();
    assert!(at(cell, "t_lo") > 3.0 && at(cell, "t_hi") < 12.0);
}

#[test]
fn d_logconvex_and_endpoint() {
    let grid: Vec<f64> = (1..1000).map(|k| k as f64 / 1000.0).collect();
    let r = verify_d_logconvex(&grid).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.worst);
    let end = lower_bound_second_derivative(0.5).unwrap();
    assert!(end.contains(6.0 - std::f64::consts::PI.powi(2) / 2.0));
    assert!(end.lo() > 1.06 && end.hi() < 1.07);
}

#[test]
fn extended_concavity_sweep() {
    let r = verify_extended_concavity(0.7, 10_000, 7).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    for m in r.margins_labelled("equal_pair") {
        assert!(m.value.contains_zero() && m.value.mag() < 1e-14, "{m:?}");
    }
    let b = r.margins_labelled("boundary_pair").next().unwrap();
    assert!(b.value.lo() > -CONCAVITY_SLACK);
}

#[test]
fn base_case_structure() {
    let xs: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
    for p in [0.1, 0.5, 0.9] {
        let r = verify_base_case(p, &xs).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "{p}: {:?}", r.worst);
        let eq = r.margins_labelled("equality_at_one").next().unwrap();
        assert!(eq.value.mag() <= 1e-8);
    }
}

#[test]
fn main_inequality_on_random_instances() {
    let mut inst = random_unit_instances(20, 2..=6, 99).unwrap();
    inst.push(CoefficientVector::equal(2).unwrap());
    inst.push(CoefficientVector::equal(8).unwrap());
    let r = verify_main_inequality(0.5, &inst).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.worst);
    let pair = r.margins_labelled("c_p_minus_moment").find(|m| at(m, "instance") == 20.0).unwrap();
    assert!(pair.value.mag() <= 1e-8);
    assert!(r.notes.iter().any(|n| n.contains("Gamma(1-p/2)")));
    assert!(c_p(0.5).unwrap() > 1.0);
}

#[test]
fn holder_chain_points() {
    let r = verify_holder_chain(0.5, &[2.0, 2.5, 3.0]).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.worst);
    let link = r.margins_labelled("log_concavity_link").find(|m| at(m, "s") == 2.5).unwrap();
    assert!(link.value.lo() > 0.0);
    let holder = r.margins_labelled("holder_link").find(|m| at(m, "s") == 2.5).unwrap();
    assert!(holder.value.lo() > 0.0);
    assert!(verify_holder_chain(0.5, &[3.5]).is_err());
}

#[test]
fn psi_master_spot_points() {
    let r = verify_psi_master(&[0.1, 0.5, 0.9], &[2.0, 2.05, 50.0]).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.worst);
    let get = |p: f64, s: f64| {
        r.margins_labelled("psi2_minus_psi").find(|m| at(m, "p") == p && at(m, "s") == s).unwrap().value
    };
    assert!(get(0.5, 2.0).contains_zero());
    assert!(get(0.9, 2.05).lo() > 0.0);
    assert!(get(0.1, 50.0).lo() > 5.0 * get(0.1, 2.05).hi());
}

#[test]
fn composition_cross_check() {
    let ps = [0.1, 0.5, 0.9];
    let ss = [2.0, 2.5, 3.0, 5.0, 20.0];
    let upper_s: Vec<f64> = ss.iter().copied().filter(|&s| s >= 3.0).collect();
    let inner_s: Vec<f64> = ss.iter().copied().filter(|&s| s <= 3.0).collect();
    let mut parts = vec![
        verify_fp_le_up(&ps, &upper_s).unwrap().verdict,
        verify_up_le_gp(&ps).unwrap().verdict,
        verify_fp3_table(&ps).unwrap().0.verdict,
    ];
    parts.extend(ps.iter().map(|&p| verify_holder_chain(p, &inner_s).unwrap().verdict));
    assert!(parts.iter().all(|&v| v == Verdict::Verified), "{parts:?}");
    let master = verify_psi_master(&ps, &ss).unwrap();
    assert_eq!(master.verdict, Verdict::Verified);
}

#[test]
fn reports_are_deterministic() {
    let a = verify_extended_concavity(0.3, 2000, 11).unwrap().without_timing();
    let b = verify_extended_concavity(0.3, 2000, 11).unwrap().without_timing();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let inst = random_unit_instances(5, 2..=4, 1).unwrap();
    let a = verify_main_inequality(0.9, &inst).unwrap().without_timing();
    let b = verify_main_inequality(0.9, &inst).unwrap().without_timing();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn report_round_trips_through_json() {
    let r = verify_l_bound().unwrap();
    let s = serde_json::to_string(&r).unwrap();
    let back: VerificationReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back.verdict, r.verdict);
    assert_eq!(back.margins.len(), r.margins.len());
    assert!(s.contains("\"lemma_id\":\"L_BOUND\""));
}

fn margin_from(lo: f64, w: f64) -> Enclosure {
    Enclosure::new(lo, lo + w)
}

proptest! {
    #[test]
    fn verdict_trichotomy(lo in -1.0f64..1.0, w in 0.0f64..1.0, slack in 0.0f64..0.1) {
        let e = margin_from(lo, w);
        let pos = Margin::positive("x", &[], e).verdict();
        let expect = if e.lo() > 0.0 { Verdict::Verified } else if e.hi() < 0.0 { Verdict::Violated } else { Verdict::Inconclusive };
        prop_assert_eq!(pos, expect);
        let sl = Margin::slack("x", &[], e, slack).verdict();
        let expect = if e.lo() > -slack { Verdict::Verified } else if e.hi() < -slack { Verdict::Violated } else { Verdict::Inconclusive };
        prop_assert_eq!(sl, expect);
    }

    #[test]
    fn report_verdict_is_weakest_margin(los in proptest::collection::vec(-1.0f64..1.0, 1..8)) {
        let margins: Vec<Margin> = los.iter().map(|&lo| Margin::positive("x", &[], margin_from(lo, 0.1))).collect();
        let r = VerificationReport::from_margins(LemmaId::BaseCase, "synthetic", margins.clone());
        let expect = margins.iter().fold(Verdict::Verified, |acc, m| acc.and(m.verdict()));
        prop_assert_eq!(r.verdict, expect);
        prop_assert_eq!(r.counterexample.is_some(), expect == Verdict::Violated);
    }

    #[test]
    fn lemma_names_round_trip(k in 0usize..11) {
        let l = LemmaId::ALL[k];
        prop_assert_eq!(l.cli_name().parse::<LemmaId>().unwrap(), l);
    }
}
