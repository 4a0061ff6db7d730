use super::*;
use crate::distmodel::{draw_sample, DistributionSpec, SampleMode};

fn seq(n: usize) -> SortedSample {
    SortedSample::new((1..=n).map(|i| i as f64).collect()).unwrap()
}

fn ts(e: f64, g: f64) -> TrimSpec {
    TrimSpec::new(e, g).unwrap()
}

const C: QuantileConvention = QuantileConvention::Ceiling;

#[test]
fn sorted_sample_validation() {
    assert_eq!(SortedSample::new(vec![]), Err(Error::EmptyInput));
    assert_eq!(SortedSample::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1)));
    assert_eq!(SortedSample::new(vec![2.0, 1.0]), Err(Error::NotSorted(1)));
    assert_eq!(SortedSample::from_unsorted(vec![3.0, 1.0, 2.0]).unwrap(), seq(3));
}

#[test]
fn trim_spec_validation() {
    assert!(TrimSpec::new(0.6, 1.0).is_err());
    assert!(TrimSpec::new(0.5, 1.0).is_ok());
    assert!(TrimSpec::new(0.1, -1.0).is_err());
    assert!(ts(0.1, 1.0).with_strata(4).is_err());
    assert!(ts(0.1, 1.0).with_nu(0).is_err());
}

#[test]
fn empirical_quantile_examples() {
    let s = seq(5);
    assert_eq!(empirical_quantile(&s, 0.8, C).unwrap(), 4.0);
    assert_eq!(empirical_quantile(&s, 0.2, C).unwrap(), 1.0);
    assert_eq!(empirical_quantile(&s, 1.0, C).unwrap(), 5.0);
    assert_eq!(empirical_quantile(&s, 0.0, C).unwrap(), 1.0);
    assert_eq!(empirical_quantile(&seq(4), 0.5, QuantileConvention::Midpoint).unwrap(), 2.5);
}

#[test]
fn quantile_average_examples() {
    let s = seq(5);
    assert_eq!(quantile_average(&s, &ts(0.2, 1.0), QaDefinition::Eq1, C).unwrap(), 2.5);
    assert_eq!(quantile_average(&s, &ts(0.2, 0.5), QaDefinition::Eq2, C).unwrap(), 3.0);
    let t = ts(1.0 / 3.0, 1.0);
    assert_eq!(quantile_average(&seq(3), &t, QaDefinition::Eq1, QuantileConvention::Midpoint).unwrap(), 2.0);
    // γ = 0 degenerates to (X1 + Q(1−ε))/2
    assert_eq!(quantile_average(&s, &ts(0.2, 0.0), QaDefinition::Eq1, C).unwrap(), 2.5);
}

#[test]
fn trimmed_mean_examples() {
    assert_eq!(trimmed_mean(&seq(8), &ts(0.25, 1.0)).unwrap(), 4.5);
    assert_eq!(trimmed_mean(&seq(10), &ts(0.2, 0.5)).unwrap(), 5.0);
    let s = SortedSample::from_unsorted(vec![3.0, 9.0, 1.0, 4.0]).unwrap();
    assert_eq!(trimmed_mean(&s, &ts(0.0, 0.7)).unwrap(), mean(&s));
    assert!(matches!(trimmed_mean(&seq(4), &ts(0.5, 1.0)), Err(Error::OverTrim(_))));
}

#[test]
fn fractional_trim() {
    // n=10, ε=0.15: core [1.5, 8.5], half weights on X2 and X9.
    let got = trimmed_mean(&seq(10), &ts(0.15, 1.0)).unwrap();
    assert!((got - 5.5).abs() < 1e-15);
    let s = SortedSample::new(vec![0., 1., 2., 3., 4., 5., 6., 7., 8., 100.]).unwrap();
    let got = trimmed_mean(&s, &ts(0.15, 1.0)).unwrap();
    let want = (0.5 * 1.0 + 2. + 3. + 4. + 5. + 6. + 7. + 0.5 * 8.0) / 7.0;
    assert!((got - want).abs() < 1e-14);
}

#[test]
fn winsorized_mean_examples() {
    assert_eq!(winsorized_mean(&seq(8), &ts(0.25, 1.0)).unwrap(), 4.5);
    assert!((winsorized_mean(&seq(10), &ts(0.2, 0.5)).unwrap() - 5.3).abs() < 1e-14);
    let s = seq(7);
    assert_eq!(winsorized_mean(&s, &ts(0.0, 1.0)).unwrap(), 4.0);
}

#[test]
fn block_winsorized_examples() {
    assert_eq!(block_winsorized_mean(&seq(8), &ts(0.125, 1.0)).unwrap(), 4.5);
    assert_eq!(block_winsorized_mean(&seq(8), &ts(0.25, 1.0)).unwrap(), 4.5);
    let s = SortedSample::new(vec![1., 2., 3., 4., 5., 6., 7., 100.]).unwrap();
    assert_eq!(block_winsorized_mean(&s, &ts(0.25, 1.0)).unwrap(), 4.5);
    assert!(matches!(block_winsorized_mean(&seq(8), &ts(0.3, 1.0)), Err(Error::Geometry(_))));
    let w = LEstimator::BlockWinsorized.profile(8, &ts(0.125, 1.0), C).unwrap().weights();
    assert_eq!(w, vec![0., 2., 1., 1., 1., 1., 2., 0.]);
}

#[test]
fn stratified_mean_examples() {
    let t = ts(1.0 / 3.0, 1.0).with_strata(3).unwrap();
    assert!((stratified_mean(&seq(9), &t).unwrap() - 5.0).abs() < 1e-14);
    let t = ts(1.0 / 6.0, 1.0);
    assert!((stratified_mean(&seq(12), &t).unwrap() - 6.5).abs() < 1e-14);
    assert!((stratified_mean(&seq(8), &ts(0.125, 1.0)).unwrap() - 4.5).abs() < 1e-14);
    // literal middle-stratum blocks at ε = 1/9: blocks 2, 5, 8 of 9
    let w = LEstimator::Stratified.profile(9, &ts(1.0 / 9.0, 1.0), C).unwrap().weights();
    assert_eq!(w, vec![0., 3., 0., 0., 3., 0., 0., 3., 0.]);
    // b = 5, ε = 1/10: unit 1/20, 10 per side, 2 groups of 5 → 4 strata of width n/20
    let t = ts(0.1, 1.0).with_strata(5).unwrap();
    let w = LEstimator::Stratified.profile(20, &t, C).unwrap().weights();
    let want: Vec<f64> = (0..20).map(|i| if i % 5 == 2 { 5.0 } else { 0.0 }).collect();
    assert_eq!(w, want);
    assert!(matches!(stratified_mean(&seq(9), &ts(0.45, 1.0)), Err(Error::Geometry(_))));
}

#[test]
fn binomial_mean_examples() {
    let t = ts(0.125, 1.0).with_nu(3).unwrap();
    assert!((binomial_mean(&seq(16), &t).unwrap() - 8.5).abs() < 1e-14);
    let w = LEstimator::Binomial.profile(8, &t, C).unwrap().weights();
    // pattern 1 − (−1)^j C(3, j) = (0, 4, −2, 2)
    assert_eq!(w, vec![0., 4., -2., 2., 2., -2., 4., 0.]);
    let t = ts(0.25, 1.0).with_nu(3).unwrap();
    assert!(matches!(binomial_mean(&seq(16), &t), Err(Error::Geometry(_))));
}

#[test]
fn sqm_examples() {
    assert_eq!(stratified_quantile_mean(&seq(4), &ts(0.25, 1.0), C).unwrap(), 2.0);
    assert_eq!(stratified_quantile_mean(&seq(8), &ts(0.125, 1.0), C).unwrap(), 4.0);
    let err = stratified_quantile_mean(&seq(8), &ts(0.1, 1.0), C).unwrap_err();
    assert!(matches!(err, Error::Parameter(ref m) if m.contains("1/12")), "{err}");
}

#[test]
fn identities_on_integral_boundaries() {
    let d = DistributionSpec::lognormal(0.8, 1.0).unwrap();
    for seed in 0..20 {
        let s = SortedSample::new(draw_sample(&d, 144, SampleMode::Pseudo, seed).unwrap().values).unwrap();
        let t4 = ts(0.25, 1.0);
        assert_eq!(
            binomial_mean(&s, &t4.with_nu(1).unwrap()).unwrap(),
            block_winsorized_mean(&s, &t4).unwrap()
        );
        for e in [1.0 / 6.0, 1.0 / 8.0, 1.0 / 9.0, 1.0 / 12.0] {
            let t = ts(e, 1.0);
            assert_eq!(
                binomial_mean(&s, &t.with_nu(2).unwrap()).unwrap(),
                stratified_mean(&s, &t.with_strata(3).unwrap()).unwrap()
            );
        }
        for e in [0.25, 1.0 / 3.0, 2.0 / 9.0] {
            let t = ts(e, 1.0);
            let a = stratified_mean(&s, &t).unwrap();
            let b = trimmed_mean(&s, &t).unwrap();
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs(), "{a} {b}");
        }
        let mh = quantile_average(&s, &t4, QaDefinition::Eq1, C).unwrap();
        let sqm = stratified_quantile_mean(&s, &t4, C).unwrap();
        assert!((mh - sqm).abs() <= 2.0 * f64::EPSILON * mh.abs());
    }
}

#[test]
fn bm1_differs_from_bwm_below_quarter() {
    // The literal definitions only coincide when a single group exists.
    let t = ts(0.125, 1.0);
    let bm = LEstimator::Binomial.profile(8, &t.with_nu(1).unwrap(), C).unwrap().weights();
    let bwm = LEstimator::BlockWinsorized.profile(8, &t, C).unwrap().weights();
    assert_eq!(bm, vec![0., 2., 0., 2., 2., 0., 2., 0.]);
    assert_ne!(bm, bwm);
}

#[test]
fn weights_sum_to_n_and_signs() {
    let n = 1000;
    for (est, t) in [
        (LEstimator::Trimmed, ts(0.1234, 0.6)),
        (LEstimator::Winsorized, ts(0.1234, 0.6)),
        (LEstimator::BlockWinsorized, ts(0.1234, 0.6)),
        (LEstimator::Stratified, ts(0.0917, 0.8).with_strata(5).unwrap()),
        (LEstimator::Binomial, ts(0.04, 0.9).with_nu(2).unwrap()),
        (LEstimator::Binomial, ts(0.03, 1.0).with_nu(3).unwrap()),
        (LEstimator::StratifiedQuantile, ts(1.0 / 12.0, 0.5)),
        (LEstimator::QuantileAverage(QaDefinition::Eq2), ts(0.2, 0.5)),
        (LEstimator::Median, ts(0.0, 1.0)),
        (LEstimator::Mean, ts(0.0, 1.0)),
    ] {
        let w = est.profile(n, &t, C).unwrap().weights();
        let total: f64 = w.iter().sum();
        assert!((total - n as f64).abs() < 1e-9, "{est}: {total}");
        if !(est == LEstimator::Binomial && t.nu >= 3 && t.nu % 2 == 1) {
            assert!(w.iter().all(|&x| x >= 0.0), "{est} has negative weights");
        }
    }
}

#[test]
fn subsample_average_mode() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let s = SortedSample::new(draw_sample(&d, 1001, SampleMode::Pseudo, 7).unwrap().values).unwrap();
    let t = ts(0.125, 1.0);
    let mode = FractionalMode::SubsampleAverage { reps: 50, seed: 3 };
    let a = LEstimator::Trimmed.estimate(&s, &t, C, mode).unwrap();
    let b = LEstimator::Trimmed.estimate(&s, &t, C, mode).unwrap();
    assert_eq!(a, b);
    let w = trimmed_mean(&s, &t).unwrap();
    assert!((a - w).abs() < 0.02, "{a} {w}");
    // Already integral: identical to the weighted mode.
    let s8 = seq(16);
    assert_eq!(LEstimator::Trimmed.estimate(&s8, &t, C, mode).unwrap(), trimmed_mean(&s8, &t).unwrap());
}

#[test]
fn population_values() {
    let e = DistributionSpec::exponential(1.0).unwrap();
    let m = population_value(&e, LEstimator::Mean, &ts(0.0, 1.0)).unwrap();
    assert!((m - 1.0).abs() < 1e-9);
    let md = population_value(&e, LEstimator::Median, &ts(0.0, 1.0)).unwrap();
    assert!((md - std::f64::consts::LN_2).abs() < 1e-15);
    // TM of the exponential: [(1−a)ln(1−a)+a]_{ε}^{1−ε}/(1−2ε)
    let f = |a: f64| (1.0 - a) * (1.0 - a).ln() + a;
    let eps: f64 = 0.1;
    let want = (f(1.0 - eps) - f(eps)) / (1.0 - 2.0 * eps);
    let got = population_value(&e, LEstimator::Trimmed, &ts(eps, 1.0)).unwrap();
    assert!((got - want).abs() < 1e-10, "{got} {want}");
}

#[test]
fn large_sample_converges_to_population() {
    let d = DistributionSpec::pareto(3.0, 1.0).unwrap();
    let s = SortedSample::new(draw_sample(&d, 1 << 20, SampleMode::Quasi, 0).unwrap().values).unwrap();
    for (est, t) in [
        (LEstimator::Trimmed, ts(0.1, 0.5)),
        (LEstimator::Winsorized, ts(0.1, 0.5)),
        (LEstimator::BlockWinsorized, ts(0.1, 1.0)),
        (LEstimator::Stratified, ts(1.0 / 9.0, 1.0)),
        (LEstimator::Binomial, ts(0.125, 1.0).with_nu(2).unwrap()),
        (LEstimator::StratifiedQuantile, ts(0.125, 0.5)),
    ] {
        let pop = population_value(&d, est, &t).unwrap();
        let smp = est.estimate(&s, &t, C, FractionalMode::Weighted).unwrap();
        assert!((pop - smp).abs() < 1e-4, "{est}: {pop} vs {smp}");
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn roster() -> Vec<(LEstimator, TrimSpec)> {
        vec![
            (LEstimator::Mean, ts(0.0, 1.0)),
            (LEstimator::Median, ts(0.0, 1.0)),
            (LEstimator::QuantileAverage(QaDefinition::Eq1), ts(0.15, 1.0)),
            (LEstimator::QuantileAverage(QaDefinition::Eq2), ts(0.15, 1.0)),
            (LEstimator::Trimmed, ts(0.13, 1.0)),
            (LEstimator::Winsorized, ts(0.13, 1.0)),
            (LEstimator::BlockWinsorized, ts(0.13, 1.0)),
            (LEstimator::Stratified, ts(1.0 / 9.0, 1.0)),
            (LEstimator::Stratified, ts(0.07, 1.0).with_strata(5).unwrap()),
            (LEstimator::Binomial, ts(0.125, 1.0).with_nu(2).unwrap()),
            (LEstimator::Binomial, ts(0.0625, 1.0).with_nu(3).unwrap()),
            (LEstimator::StratifiedQuantile, ts(0.125, 1.0)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn equivariance(mut xs in proptest::collection::vec(-1e3f64..1e3, 40..200),
                        lambda in 0.01f64..100.0, mu in -1e4f64..1e4) {
            xs.sort_by(|a, b| a.total_cmp(b));
            let s = SortedSample::new(xs).unwrap();
            let y = s.affine(lambda, mu).unwrap();
            let scale = lambda * 1e3 + mu.abs();
            for (est, t) in roster() {
                let (Ok(a), Ok(b)) = (est.estimate(&s, &t, C, FractionalMode::Weighted),
                                      est.estimate(&y, &t, C, FractionalMode::Weighted)) else { continue };
                prop_assert!((b - (lambda * a + mu)).abs() <= 1e-12 * scale, "{} {} {}", est, b, lambda * a + mu);
            }
        }

        #[test]
        fn symmetric_collapse(half in proptest::collection::vec(0f64..1e3, 20..100), c in -50f64..50.0) {
            let mut xs: Vec<f64> = half.iter().map(|h| c / 2.0 - h).chain(half.iter().map(|h| c / 2.0 + h)).collect();
            xs.sort_by(|a, b| a.total_cmp(b));
            let s = SortedSample::new(xs).unwrap();
            for (est, t) in roster() {
                // The ceiling rule is asymmetric at integral n·p; symmetry uses the midpoint rule.
                let Ok(v) = est.estimate(&s, &t, QuantileConvention::Midpoint, FractionalMode::Weighted) else { continue };
                prop_assert!((v - c / 2.0).abs() <= 1e-12 * (1e3 + c.abs()), "{} {} {}", est, v, c / 2.0);
            }
        }

        #[test]
        fn estimates_within_range(mut xs in proptest::collection::vec(-1e6f64..1e6, 30..120)) {
            xs.sort_by(|a, b| a.total_cmp(b));
            let s = SortedSample::new(xs.clone()).unwrap();
            for (est, t) in roster() {
                let Ok(v) = est.estimate(&s, &t, C, FractionalMode::Weighted) else { continue };
                if est == LEstimator::Binomial && t.nu == 3 { continue; }
                prop_assert!(v >= xs[0] - 1e-9 && v <= xs[xs.len() - 1] + 1e-9);
            }
        }
    }
}
