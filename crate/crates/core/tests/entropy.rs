use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use steinhaus::entropy::{
    radial_density, renyi_gaussian, renyi_gaussian_numeric, renyi_profile, renyi_steinhaus, verify_renyi_upper,
    GridSpec, GAUSSIAN_SLACK, MASS_TOL, SECOND_MOMENT_TOL,
};
use steinhaus::moments::CoefficientVector;
use steinhaus::verifier::{LemmaId, Verdict};

fn spec() -> GridSpec {
    GridSpec::default()
}

#[test]
fn three_term_mass_and_variance() {
    let a = CoefficientVector::normalized(&[0.6, 0.6, (1.0f64 - 0.72).sqrt()]).unwrap();
    let d = radial_density(&a, spec()).unwrap();
    assert!(d.mass_error <= MASS_TOL, "{}", d.mass_error);
    assert!((d.second_moment() - 1.0).abs() <= SECOND_MOMENT_TOL);
    assert!(d.values.iter().all(|&f| f >= 0.0));
    assert!(d.grid.iter().all(|&r| r >= d.inner_radius && r <= d.tail_radius));
    assert!((d.tail_radius - a.sum()).abs() < 1e-15);
}

#[test]
fn four_and_six_term_invariants() {
    for a in [
        CoefficientVector::equal(4).unwrap(),
        CoefficientVector::normalized(&[0.9, 0.3, 0.2, 0.25]).unwrap(),
        CoefficientVector::normalized(&[1.0, 0.7, 0.5, 0.4, 0.3, 0.2]).unwrap(),
    ] {
        let d = radial_density(&a, spec()).unwrap();
        assert!(d.mass_error <= MASS_TOL, "{a:?}: {}", d.mass_error);
        assert!((d.second_moment() - 1.0).abs() <= SECOND_MOMENT_TOL, "{a:?}");
        let hs: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&p| d.renyi(p).unwrap()).collect();
        assert!(hs.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{hs:?}");
    }
}

#[test]
fn touching_inner_edge() {
    for c in [[3.0, 2.0, 1.0], [3.0, 2.0, 0.9995]] {
        let a = CoefficientVector::normalized(&c).unwrap();
        let d = radial_density(&a, spec()).unwrap();
        assert!(d.mass_error <= MASS_TOL, "{c:?}: {}", d.mass_error);
        assert!((d.second_moment() - 1.0).abs() <= SECOND_MOMENT_TOL, "{c:?}");
        assert!(d.renyi(1.0).unwrap() < renyi_gaussian(1.0).unwrap());
    }
}

#[test]
fn three_equal_steps_match_closed_form_walk() {
    // Entropies of the three-step walk density
    // p_3(x) = 2 sqrt3/pi x/(3+x^2) 2F1(1/3, 2/3; 1; x^2 (9-x^2)^2/(3+x^2)^3),
    // rescaled by 1/sqrt 3, integrated with mpmath at 30 digits.
    let want = [
        (0.25, 2.194_915_647_221_275),
        (0.5, 2.144_123_291_592_614),
        (0.75, 2.091_546_120_269_705),
        (1.0, 2.037_894_265_063_525),
    ];
    let a = CoefficientVector::equal(3).unwrap();
    let d = radial_density(&a, spec()).unwrap();
    for (p, h) in want {
        let got = d.renyi(p).unwrap();
        assert!((got - h).abs() < 1e-7, "p={p}: {got} vs {h}");
    }
}

#[test]
fn two_term_support_entropy() {
    let eq = CoefficientVector::equal(2).unwrap();
    let h0 = renyi_steinhaus(&eq, 0.0, spec()).unwrap();
    assert!((h0 - (PI * eq.sum().powi(2)).ln()).abs() < 1e-12);
    let a = CoefficientVector::normalized(&[0.8, 0.5]).unwrap();
    let (a1, a2) = (a.as_slice()[0], a.as_slice()[1]);
    let h0 = renyi_steinhaus(&a, 0.0, spec()).unwrap();
    assert!((h0 - (PI * ((a1 + a2).powi(2) - (a1 - a2).powi(2))).ln()).abs() < 1e-12);
    let h1 = renyi_steinhaus(&eq, 1.0, spec()).unwrap();
    assert!((h1 - (PI * PI / 2.0).ln()).abs() < 1e-12);
}

#[test]
fn support_annulus_by_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for a in
        [CoefficientVector::normalized(&[0.8, 0.5]).unwrap(), CoefficientVector::normalized(&[0.9, 0.3, 0.2]).unwrap()]
    {
        let d = radial_density(&a, spec()).unwrap();
        let samples = 200_000;
        let mid = 0.5 * (d.inner_radius + d.tail_radius);
        let (mut lo, mut hi, mut below) = (f64::INFINITY, 0.0f64, 0usize);
        for _ in 0..samples {
            let (mut x, mut y) = (0.0, 0.0);
            for &aj in a.as_slice() {
                let th: f64 = rng.gen_range(0.0..2.0 * PI);
                x += aj * th.cos();
                y += aj * th.sin();
            }
            let r = x.hypot(y);
            lo = lo.min(r);
            hi = hi.max(r);
            below += (r < mid) as usize;
        }
        assert!(lo >= d.inner_radius - 1e-12 && lo - d.inner_radius < 5e-3, "{a:?}: {lo}");
        assert!(hi <= d.tail_radius + 1e-12 && d.tail_radius - hi < 5e-2, "{a:?}: {hi}");
        let frac = below as f64 / samples as f64;
        let cdf = d.integrate(|r, f| if r < mid { f } else { 0.0 });
        let sigma = (frac * (1.0 - frac) / samples as f64).sqrt();
        assert!((frac - cdf).abs() < 5.0 * sigma + 2e-3, "{a:?}: {frac} vs {cdf}");
    }
}

#[test]
fn gaussian_dominance_and_clt_trend() {
    let ps = [0.25, 0.5, 0.75, 1.0];
    let mut prev = vec![f64::INFINITY; ps.len()];
    for n in [2, 4, 8, 16] {
        let a = CoefficientVector::equal(n).unwrap();
        let hs = renyi_profile(&a, &ps, spec()).unwrap();
        for (k, (&p, h)) in ps.iter().zip(hs).enumerate() {
            let gap = renyi_gaussian(p).unwrap() - h;
            assert!(gap > -GAUSSIAN_SLACK, "n={n} p={p}: {gap}");
            assert!(gap < prev[k], "n={n} p={p}: {gap} vs {}", prev[k]);
            prev[k] = gap;
        }
    }
}

#[test]
fn gaussian_plane_integral_at_half() {
    let num = renyi_gaussian_numeric(0.5).unwrap();
    assert!((num - (PI.ln() + 2.0 * 2f64.ln())).abs() < 1e-6);
}

#[test]
fn renyi_upper_report() {
    let pair = CoefficientVector::equal(2).unwrap();
    let r = verify_renyi_upper(std::slice::from_ref(&pair), &[0.5, 1.0]).unwrap();
    assert_eq!(r.lemma_id, LemmaId::RenyiUpper);
    assert_eq!(r.verdict, Verdict::Verified, "{r:?}");

    let sixteen = CoefficientVector::equal(16).unwrap();
    let r = verify_renyi_upper(&[sixteen], &[0.9, 1.0]).unwrap();
    assert_eq!(r.verdict, Verdict::Verified, "{r:?}");
    let m: Vec<_> = r.margins_labelled("gaussian_minus_steinhaus").collect();
    assert!(m.iter().all(|m| m.value.lo() > 0.0 && m.value.hi() < 0.01), "{m:?}");
}

#[test]
fn renyi_upper_rejects_bad_input() {
    let a = CoefficientVector::new(&[1.0, 1.0]).unwrap();
    assert!(verify_renyi_upper(&[a], &[0.5]).is_err());
    let pair = CoefficientVector::equal(2).unwrap();
    assert!(verify_renyi_upper(&[pair], &[0.0]).is_err());
    assert!(renyi_gaussian(1.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_term_below_gaussian(x in 0.01f64..1.0, p in 0.0f64..=1.0) {
        let a = CoefficientVector::normalized(&[1.0, x]).unwrap();
        let h = renyi_steinhaus(&a, p, spec()).unwrap();
        prop_assert!(h <= renyi_gaussian(p).unwrap());
    }

    #[test]
    fn gaussian_entropy_decreasing(p in 0.01f64..0.99, dp in 0.001f64..0.01) {
        prop_assert!(renyi_gaussian(p + dp).unwrap() < renyi_gaussian(p).unwrap());
    }
}
