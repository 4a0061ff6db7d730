use proptest::prelude::*;
use robloc::distmodel::{DistributionSpec, Family};
use robloc::numeric::integrate;

fn spec() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|l| DistributionSpec::exponential(l).unwrap()),
        (0.3f64..8.0, 0.5f64..3.0).prop_map(|(a, l)| DistributionSpec::weibull(a, l).unwrap()),
        (0.3f64..200.0, 0.5f64..3.0).prop_map(|(a, l)| DistributionSpec::gamma(a, l).unwrap()),
        (0.05f64..2.0, 0.5f64..3.0).prop_map(|(s, l)| DistributionSpec::lognormal(s, l).unwrap()),
        (0.5f64..20.0, 0.5f64..3.0).prop_map(|(a, x)| DistributionSpec::pareto(a, x).unwrap()),
        (-5f64..5.0, 0.1f64..4.0).prop_map(|(m, s)| DistributionSpec::gaussian(m, s).unwrap()),
        (0.5f64..6.0, 0.5f64..2.0).prop_map(|(b, s)| DistributionSpec::generalized_gaussian(b, s, 0.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn quantile_nondecreasing(d in spec(), mut ps in proptest::collection::vec(1e-9f64..1.0 - 1e-9, 2..40)) {
        ps.sort_by(f64::total_cmp);
        let qs: Vec<f64> = ps.iter().map(|&p| d.quantile(p).unwrap()).collect();
        prop_assert!(qs.windows(2).all(|w| w[0] <= w[1]), "{d}");
    }

    #[test]
    fn density_nonnegative_and_normalised(d in spec()) {
        let (lo, hi) = (d.quantile(1e-9).unwrap(), d.quantile_upper(1e-9).unwrap());
        for i in 0..50 {
            prop_assert!(d.density(lo + (hi - lo) * i as f64 / 49.0) >= 0.0);
        }
        // ∫f over the central (1 − 2e−9) probability mass, split at the median.
        let m = d.quantile(0.5).unwrap();
        let mass = integrate(|x| d.density(x), lo, m, 1e-10).unwrap().value
            + integrate(|x| d.density(x), m, hi, 1e-10).unwrap().value;
        prop_assert!((mass - 1.0).abs() < 1e-6, "{d}: {mass}");
    }

    #[test]
    fn moment_inequality(d in spec()) {
        if let Ok(m) = d.moment_summary() {
            prop_assert!(m.sd > 0.0);
            prop_assert!(m.kurtosis >= 1.0 + m.skewness * m.skewness - 1e-9, "{d}: {m:?}");
        }
    }
}

#[test]
fn kurtosis_inversion_across_families() {
    for (fam, kappas) in [
        (Family::Weibull, vec![3.0, 5.0, 9.0, 15.0]),
        (Family::Gamma, vec![3.5, 5.0, 9.0, 15.0]),
        (Family::Lognormal, vec![3.5, 5.0, 9.0, 15.0]),
        (Family::Pareto, vec![12.0, 18.0, 30.0]),
    ] {
        for k in kappas {
            let d = robloc::distmodel::solve_param_for_kurtosis(fam, k, 1.0).unwrap();
            let got = d.moment_summary().unwrap().kurtosis;
            assert!((got - k).abs() <= 1e-6, "{fam:?} {k} -> {got}");
        }
    }
}
