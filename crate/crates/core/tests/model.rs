mod common;

use gi0_core::{
    gi0_sample, mixture_cdf, sample_contaminated, unit_mean_scale, ContaminationSpec, Gi0Params, Moment, MomentOrder,
};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Gi0Params> {
    (-15.0f64..-1.05, 1.0f64..12.0).prop_map(|(a, l)| Gi0Params::unit_mean(a, l).unwrap())
}

proptest! {
    #[test]
    fn pdf_matches_reference_formula(p in params(), z in 1e-4f64..1e4) {
        let want = common::gi0_pdf(z, p.alpha(), p.gamma(), p.looks());
        let got = p.pdf(z).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * want.max(1e-300), "{got} vs {want}");
    }

    #[test]
    fn cdf_is_monotone_and_complements_sf(p in params(), z in 1e-3f64..1e3, dz in 1e-3f64..10.0) {
        let (f1, f2) = (p.cdf(z).unwrap(), p.cdf(z + dz).unwrap());
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(f2 >= f1);
        prop_assert!((f1 + p.sf(z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ln_pdf_is_log_of_pdf(p in params(), z in 1e-3f64..1e3) {
        let pdf = p.pdf(z).unwrap();
        prop_assume!(pdf > 1e-300);
        prop_assert!((p.ln_pdf(z).unwrap() - pdf.ln()).abs() < 1e-9);
    }

    #[test]
    fn quantile_inverts_sf(p in params(), e in -9.0f64..-1.0) {
        let tail = 10f64.powf(e);
        let q = p.upper_quantile(tail).unwrap();
        prop_assert!((p.sf(q).unwrap() / tail - 1.0).abs() < 1e-6);
    }

    #[test]
    fn samples_are_positive_and_reproducible(p in params(), seed in any::<u64>()) {
        let a = gi0_sample(&p, 64, seed).unwrap();
        prop_assert!(a.values().iter().all(|&z| z > 0.0 && z.is_finite()));
        let b = gi0_sample(&p, 64, seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn zero_epsilon_contamination_is_the_base_law(p in params(), seed in any::<u64>(), which in 0usize..3) {
        let spec = [
            ContaminationSpec::Case1 { epsilon: 0.0, alpha2: -15.0 },
            ContaminationSpec::Case2 { epsilon: 0.0, c_value: 100.0 },
            ContaminationSpec::Case3 { epsilon: 0.0, k_exponent: 2 },
        ][which];
        let c = sample_contaminated(&p, &spec, 50, seed).unwrap();
        let plain = gi0_sample(&p, 50, seed).unwrap();
        prop_assert_eq!(c.values(), plain.values());
    }
}

#[test]
fn normalization_against_log_grid_simpson() {
    for &a in &[-1.5, -3.0, -5.0] {
        for &l in &[1.0, 3.0, 8.0] {
            let g = unit_mean_scale(a).unwrap();
            let p = Gi0Params::new(a, g, l).unwrap();
            let hi = p.upper_quantile(1e-12).unwrap();
            let body = common::log_simpson(|z| common::gi0_pdf(z, a, g, l), 1e-12, hi, 200_000);
            assert!((body - 1.0).abs() < 2e-9, "({a}, {l}): {body}");
            assert!((p.cdf(hi).unwrap() - body).abs() < 2e-9);
        }
    }
}

#[test]
fn moments_match_gamma_ratio() {
    // E Z^r = (gamma/L)^r Gamma(-a-r) Gamma(L+r) / (Gamma(-a) Gamma(L)).
    for &(a, g, l, r) in &[(-3.0, 2.0, 1.0, 2.0), (-3.0, 2.0, 3.0, 1.0), (-5.0, 4.0, 8.0, 0.5), (-2.5, 1.0, 2.0, 1.5)] {
        let p = Gi0Params::new(a, g, l).unwrap();
        let want =
            ((g / l).ln() * r + common::lgamma(-a - r) + common::lgamma(l + r) - common::lgamma(-a) - common::lgamma(l))
                .exp();
        match p.moment(MomentOrder::new(r).unwrap()) {
            Moment::Finite(v) => assert!((v / want - 1.0).abs() < 1e-12, "{v} vs {want}"),
            Moment::Infinite => panic!("moment should be finite"),
        }
    }
    let p = Gi0Params::new(-3.0, 2.0, 1.0).unwrap();
    assert_eq!(p.moment(MomentOrder::new(3.0).unwrap()), Moment::Infinite);
}

#[test]
fn second_moment_against_simulation() {
    // Z^2 has finite variance only for alpha < -4, so the check uses alpha = -6.
    let p = Gi0Params::unit_mean(-6.0, 2.0).unwrap();
    let s = gi0_sample(&p, 1_000_000, 99).unwrap();
    let sq: Vec<f64> = s.values().iter().map(|z| z * z).collect();
    let want = p.moment(MomentOrder::new(2.0).unwrap()).finite().unwrap();
    let se = common::sd(&sq) / 1000.0;
    assert!((common::mean(&sq) - want).abs() < 5.0 * se, "{} vs {want}", common::mean(&sq));
}

#[test]
fn sampler_follows_cdf() {
    let p = Gi0Params::new(-3.0, 2.0, 1.0).unwrap();
    let s = gi0_sample(&p, 200_000, 3).unwrap();
    let d = common::ks_one_sample(s.values(), |z| 1.0 - (2.0 / (2.0 + z)).powi(3));
    assert!(d < 0.005, "{d}");
}

#[test]
fn case3_mixture_mean() {
    let p = Gi0Params::unit_mean(-3.0, 1.0).unwrap();
    let spec = ContaminationSpec::Case3 { epsilon: 0.005, k_exponent: 2 };
    let s = sample_contaminated(&p, &spec, 1_000_000, 17).unwrap();
    let (m, se) = (common::mean(s.values()), common::sd(s.values()) / 1000.0);
    assert!((m - 1.495).abs() < 5.0 * se, "mean {m}, se {se}");
}

#[test]
fn case1_mixture_cdf_matches_draws() {
    let p = Gi0Params::unit_mean(-3.0, 1.0).unwrap();
    let spec = ContaminationSpec::Case1 { epsilon: 0.01, alpha2: -15.0 };
    let f1 = p.cdf(1.0).unwrap();
    let f2 = Gi0Params::unit_mean(-15.0, 1.0).unwrap().cdf(1.0).unwrap();
    assert!((mixture_cdf(1.0, &p, &spec).unwrap() - (0.99 * f1 + 0.01 * f2)).abs() < 1e-15);

    let s = sample_contaminated(&p, &spec, 1_000_000, 23).unwrap();
    let d = common::ks_one_sample(s.values(), |z| mixture_cdf(z, &p, &spec).unwrap());
    assert!(d < 0.005, "{d}");
}

#[test]
fn case2_mixture_has_an_atom() {
    let p = Gi0Params::unit_mean(-3.0, 3.0).unwrap();
    let spec = ContaminationSpec::Case2 { epsilon: 0.01, c_value: 100.0 };
    let s = sample_contaminated(&p, &spec, 200_000, 4).unwrap();
    let frac = s.values().iter().filter(|&&z| z == 100.0).count() as f64 / 2e5;
    assert!((frac - 0.01).abs() < 5.0 * (0.01f64 * 0.99 / 2e5).sqrt(), "{frac}");
    let jump = mixture_cdf(100.0, &p, &spec).unwrap() - mixture_cdf(100.0 - 1e-9, &p, &spec).unwrap();
    assert!((jump - 0.01).abs() < 1e-9);
}
