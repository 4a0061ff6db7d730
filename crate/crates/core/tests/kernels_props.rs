use proptest::prelude::*;
use robloc::distmodel::{draw_sample, DistributionSpec, SampleMode};
use robloc::estimators::{mean, LEstimator, QuantileConvention, SortedSample, TrimSpec};
use robloc::kernels::*;

fn sorted(mut v: Vec<f64>) -> SortedSample {
    v.sort_by(f64::total_cmp);
    SortedSample::new(v).unwrap()
}

fn pseudo(d: &DistributionSpec, n: usize, seed: u64) -> SortedSample {
    SortedSample::new(draw_sample(d, n, SampleMode::Pseudo, seed).unwrap().values).unwrap()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt();
    (m, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn support_shrinks_with_k(v in proptest::collection::vec(-100f64..100.0, 6..14)) {
        let s = sorted(v);
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..=s.len() {
            let seq = kernel_sequence(&s, &KernelSpec::new(k as f64).unwrap().with_mode(KernelMode::Exact)).unwrap();
            let (lo, hi) = (seq.values[0], *seq.values.last().unwrap());
            let xs = s.values();
            let lo_want = xs[..k].iter().sum::<f64>() / k as f64;
            let hi_want = xs[xs.len() - k..].iter().sum::<f64>() / k as f64;
            prop_assert!((lo - lo_want).abs() <= 1e-12 * 100.0 && (hi - hi_want).abs() <= 1e-12 * 100.0);
            if let Some((plo, phi)) = prev {
                prop_assert!(lo >= plo - 1e-12 && hi <= phi + 1e-12);
            }
            prop_assert!(seq.values.windows(2).all(|w| w[0] <= w[1]));
            prev = Some((lo, hi));
        }
    }

    #[test]
    fn kernel_equivariance(v in proptest::collection::vec(-100f64..100.0, 5..30),
                           w in proptest::collection::vec(0.0f64..5.0, 3),
                           lambda in 0.01f64..50.0, mu in -1e3f64..1e3) {
        prop_assume!(w.iter().any(|&x| x > 0.0));
        let s = sorted(v);
        let y = s.affine(lambda, mu).unwrap();
        for spec in [
            KernelSpec::new(3.0).unwrap().with_weights(w.clone()).unwrap(),
            KernelSpec::new(2.5).unwrap().with_weights(w.clone()).unwrap().with_budget(500).unwrap().with_seed(4),
        ] {
            let a = kernel_sequence(&s, &spec).unwrap();
            let b = kernel_sequence(&y, &spec).unwrap();
            let scale = lambda * 100.0 + mu.abs();
            for (x, z) in a.values.iter().zip(&b.values) {
                prop_assert!((lambda * x + mu - z).abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn converges_to_mean_as_k_grows() {
    let d = DistributionSpec::lognormal(1.0, 1.0).unwrap();
    let s = pseudo(&d, 14, 2);
    let m = mean(&s);
    let t = TrimSpec::new(0.02, 1.0).unwrap();
    let mut gaps = Vec::new();
    for k in [1.0, 4.0, 8.0, 12.0, 14.0] {
        let v = weighted_hl_mean(&s, &KernelSpec::new(k).unwrap(), LEstimator::Trimmed, &t, QuantileConvention::Ceiling).unwrap();
        gaps.push((v - m).abs());
    }
    assert_eq!(*gaps.last().unwrap(), 0.0);
    assert!(gaps[3] < gaps[0]);
}

fn contaminate(s: &SortedSample, c: f64) -> SortedSample {
    let mut v = s.values().to_vec();
    let n = v.len();
    let m = (c * n as f64).floor() as usize;
    for x in &mut v[n - m..] {
        *x = 1e12;
    }
    sorted(v)
}

#[test]
fn breakdown_empirics() {
    let g = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let spec = KernelSpec::new(2.0).unwrap();
    for seed in 0..3 {
        let s = pseudo(&g, 1000, seed);
        let ok = median_hl_mean(&contaminate(&s, 0.25), &spec).unwrap();
        let broken = median_hl_mean(&contaminate(&s, 0.35), &spec).unwrap();
        assert!(ok.abs() < 1e6, "{ok}");
        assert!(broken > 1e6, "{broken}");
    }
}

#[test]
fn exact_and_bootstrap_agree() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let s = pseudo(&d, 500, 11);
    let exact = kernel_sequence(&s, &KernelSpec::new(2.0).unwrap().with_mode(KernelMode::Exact)).unwrap();
    let boot = kernel_sequence(
        &s,
        &KernelSpec::new(2.0).unwrap().with_mode(KernelMode::Bootstrap).with_budget(1_000_000).unwrap().with_seed(5),
    )
    .unwrap();
    let med = |v: &[f64]| robloc::estimators::median(&SortedSample::new(v.to_vec()).unwrap());
    let se = boot.quantile_se(0.5).unwrap();
    assert!(se > 0.0);
    assert!((med(&exact.values) - med(&boot.values)).abs() <= 3.0 * se, "se {se}");
    // Quasi index stream also agrees.
    let quasi = kernel_sequence(
        &s,
        &KernelSpec::new(2.0)
            .unwrap()
            .with_mode(KernelMode::Bootstrap)
            .with_budget(1_000_000)
            .unwrap()
            .with_stream(IndexStream::Quasi),
    )
    .unwrap();
    assert!((med(&exact.values) - med(&quasi.values)).abs() <= 3.0 * se);
}

#[test]
fn gamma_mom_matches_hl_asymptotically() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let (mut mom, mut hl) = (Vec::new(), Vec::new());
    let reps = 60;
    for seed in 0..reps {
        let s = pseudo(&d, 20_000, 100 + seed);
        mom.push(gamma_median_of_means(s.values(), 2, 1.0, Partition::Shuffled(seed)).unwrap());
        let spec = KernelSpec::new(2.0).unwrap().with_budget(1_000_000).unwrap().with_seed(seed);
        hl.push(median_hl_mean(&s, &spec).unwrap());
    }
    let (m1, s1) = mean_sd(&mom);
    let (m2, s2) = mean_sd(&hl);
    let se = ((s1 * s1 + s2 * s2) / reps as f64).sqrt();
    assert!((m1 - m2).abs() <= 3.0 * se, "{m1} {m2} se {se}");
    // MoM is noisier than H-L on the same samples.
    assert!(s2 < s1, "sd mom {s1} hl {s2}");
}

#[test]
fn morm_matches_mom() {
    let d = DistributionSpec::lognormal(1.0, 1.0).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for seed in 0..30 {
        let s = pseudo(&d, 10_000, 500 + seed);
        a.push(median_of_randomized_means(s.values(), 2, 5_000, seed).unwrap());
        b.push(gamma_median_of_means(s.values(), 2, 1.0, Partition::Shuffled(seed)).unwrap());
    }
    let (m1, s1) = mean_sd(&a);
    let (m2, s2) = mean_sd(&b);
    let se = ((s1 * s1 + s2 * s2) / 30.0).sqrt();
    assert!((m1 - m2).abs() <= 3.0 * se, "{m1} {m2} se {se}");
}

#[test]
fn mhlm_exponential_population_value() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let s = SortedSample::new(draw_sample(&d, 200_000, SampleMode::Quasi, 0).unwrap().values).unwrap();
    let spec = KernelSpec::new(2.0).unwrap().with_budget(4_000_000).unwrap();
    let v = median_hl_mean(&s, &spec).unwrap();
    let want = robloc::bounds::expected_hl_exponential(1.0).unwrap();
    assert!((v - want).abs() < 0.005, "{v}");
}
