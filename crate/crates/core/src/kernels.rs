//! U-statistic kernels: k-wise weighted means of a sample, the L-statistics
//! built on their sorted sequence (LL-statistics, the weighted
//! Hodges–Lehmann mean family), γ-median of means and median of randomized
//! means.
//!
//! Randomized paths are deterministic given their seed. Work is split into
//! fixed-size chunks, and each chunk draws from its own ChaCha stream (or
//! its own range of Sobol points). The result does not depend on the rayon
//! pool size.

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distmodel::{sample_rng, SobolStream, SOBOL_MAX_DIM};
use crate::error::{domain, param, Error, Result};
use crate::estimators::{empirical_quantile, median, LEstimator, QuantileConvention, SortedSample, TrimSpec};
use crate::numeric::is_integral;

/// Exact enumeration is refused beyond this many kernel evaluations.
pub const ENUMERATION_CAP: u64 = 10_000_000;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Exact,
    Bootstrap,
    /// Exact when k is integral and C(n, k) ≤ [`ENUMERATION_CAP`].
    Auto,
}

/// Source of the random index sets in bootstrap mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexStream {
    Pseudo,
    Quasi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub k: f64,
    /// Rank weights w_1..w_⌈k⌉; `None` is the all-ones (hl_k) kernel.
    pub weights: Option<Vec<f64>>,
    /// Number of draws in bootstrap mode. `None` means min(10⁷, 100 n).
    pub budget: Option<usize>,
    pub seed: u64,
    pub mode: KernelMode,
    pub stream: IndexStream,
}

impl KernelSpec {
    pub fn new(k: f64) -> Result<Self> {
        let s = Self {
            k,
            weights: None,
            budget: None,
            seed: 0,
            mode: KernelMode::Auto,
            stream: IndexStream::Pseudo,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Result<Self> {
        self.weights = Some(w);
        self.validate()?;
        Ok(self)
    }

    pub fn with_budget(mut self, b: usize) -> Result<Self> {
        self.budget = Some(b);
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: KernelMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_stream(mut self, stream: IndexStream) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 1.0) || !self.k.is_finite() {
            return Err(param(format!("kernel order k = {} must be >= 1", self.k)));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.k.ceil() as usize {
                return Err(param(format!("need {} kernel weights, got {}", self.k.ceil(), w.len())));
            }
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(param("kernel weights must be finite and nonnegative"));
            }
            if w.iter().all(|&x| x == 0.0) {
                return Err(param("kernel weights are all zero"));
            }
        }
        if self.budget == Some(0) {
            return Err(param("bootstrap budget must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapPlan {
    pub draws_floor: usize,
    pub draws_ceil: usize,
    pub total: usize,
}

/// Sorted kernel outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSequence {
    pub values: Vec<f64>,
    pub source_n: usize,
    pub k_used: f64,
    pub exhaustive: bool,
}

impl KernelSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Monte-Carlo SE of the p-quantile as an estimate of the exhaustive
    /// sequence's quantile (see [`sparsity_se`]); 0 when exhaustive.
    pub fn quantile_se(&self, p: f64) -> Result<f64> {
        if self.exhaustive {
            return Ok(0.0);
        }
        sparsity_se(&self.values, p)
    }

    fn into_sorted(self) -> Result<SortedSample> {
        SortedSample::new(self.values)
    }
}

/// SE of the p-quantile of `values` (sorted), treated as B i.i.d. draws:
/// (Q(p+h) − Q(p−h))/(2h) · √(p(1−p)/B) with h = B^(−1/3)/2.
pub fn sparsity_se(values: &[f64], p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("p = {p} outside [0, 1]")));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let b = values.len() as f64;
    let h = (0.5 * b.powf(-1.0 / 3.0)).min(p).min(1.0 - p);
    if h <= 0.0 {
        return Err(Error::Precision("quantile SE undefined at p in {0, 1}".into()));
    }
    let q = |x: f64| {
        let i = ((x * b).ceil() as usize).clamp(1, values.len());
        values[i - 1]
    };
    let sparsity = (q(p + h) - q(p - h)) / (2.0 * h);
    Ok(sparsity * (p * (1.0 - p) / b).sqrt())
}

/// ε = 1 − (1 − ε₀)^{1/k}.
pub fn breakdown_mapping(epsilon0: f64, k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon0) {
        return Err(domain(format!("epsilon0 = {epsilon0} outside [0, 1)")));
    }
    if !(k >= 1.0) {
        return Err(param(format!("k = {k} must be >= 1")));
    }
    Ok(-((-epsilon0).ln_1p() / k).exp_m1())
}

/// ε₀ = 1 − (1 − ε)^k.
pub fn inverse_breakdown_mapping(epsilon: f64, k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(domain(format!("epsilon = {epsilon} outside [0, 1)")));
    }
    if !(k >= 1.0) {
        return Err(param(format!("k = {k} must be >= 1")));
    }
    Ok(-((-epsilon).ln_1p() * k).exp_m1())
}

/// Split b draws between the ⌊k⌋- and ⌈k⌉-sized kernels. The floor count is
/// round-half-even of (1 − k + ⌊k⌋)·b.
pub fn quasi_bootstrap_plan(k: f64, b: usize) -> Result<BootstrapPlan> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(param(format!("k = {k} must be >= 1")));
    }
    if b == 0 {
        return Err(param("bootstrap size must be at least 1"));
    }
    let frac = k - k.floor();
    let draws_floor = if frac == 0.0 {
        b
    } else {
        (((1.0 - frac) * b as f64).round_ties_even() as usize).min(b)
    };
    Ok(BootstrapPlan {
        draws_floor,
        draws_ceil: b - draws_floor,
        total: b,
    })
}

fn binomial_capped(n: usize, k: usize, cap: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > cap as u128 {
            return None;
        }
    }
    Some(c as u64)
}

fn kernel_value(xs: &[f64], idx: &[usize], w: Option<&[f64]>) -> f64 {
    match w {
        None => idx.iter().map(|&i| xs[i]).sum::<f64>() / idx.len() as f64,
        Some(w) => {
            let w = &w[..idx.len()];
            let num: f64 = idx.iter().zip(w).map(|(&i, &wi)| xs[i] * wi).sum();
            num / w.iter().sum::<f64>()
        }
    }
}

fn enumerate(xs: &[f64], k: usize, w: Option<&[f64]>) -> Vec<f64> {
    let n = xs.len();
    (0..=n - k)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut idx: Vec<usize> = (first..first + k).collect();
            loop {
                out.push(kernel_value(xs, &idx, w));
                if !advance_tail(&mut idx, n) {
                    break;
                }
            }
            out
        })
        .collect()
}

/// Next combination in lexicographic order with idx[0] held fixed.
fn advance_tail(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut j = k;
    while j > 1 {
        j -= 1;
        if idx[j] < n - (k - j) {
            idx[j] += 1;
            for l in j + 1..k {
                idx[l] = idx[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Uniform m-subset of 0..n from per-coordinate uniforms: pick the r-th
/// smallest unused index at each step. The result is sorted.
fn subset_from_uniforms(n: usize, u: impl Iterator<Item = f64>, idx: &mut Vec<usize>) {
    idx.clear();
    for (c, ui) in u.enumerate() {
        let mut r = ((ui * (n - c) as f64) as usize).min(n - c - 1);
        let mut pos = 0;
        while pos < idx.len() && idx[pos] <= r {
            r += 1;
            pos += 1;
        }
        idx.insert(pos, r);
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, m: usize, idx: &mut Vec<usize>) {
    if m <= 32 {
        idx.clear();
        for c in 0..m {
            let mut r = rng.random_range(0..n - c);
            let mut pos = 0;
            while pos < idx.len() && idx[pos] <= r {
                r += 1;
                pos += 1;
            }
            idx.insert(pos, r);
        }
    } else {
        *idx = sample_indices(rng, n, m).into_vec();
        idx.sort_unstable();
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = sample_rng(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn bootstrap(xs: &[f64], spec: &KernelSpec, b: usize) -> Result<Vec<f64>> {
    let n = xs.len();
    let plan = quasi_bootstrap_plan(spec.k, b)?;
    let lo = spec.k.floor() as usize;
    let hi = spec.k.ceil() as usize;
    let size = |j: usize| if j < plan.draws_floor { lo } else { hi };
    let w = spec.weights.as_deref();
    if spec.stream == IndexStream::Quasi && hi > SOBOL_MAX_DIM {
        return Err(Error::UnsupportedDimension(hi));
    }
    let chunks = b.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(b);
            let mut out = Vec::with_capacity(end - start);
            let mut idx = Vec::with_capacity(hi);
            match spec.stream {
                IndexStream::Pseudo => {
                    let mut rng = chunk_rng(spec.seed, c);
                    for j in start..end {
                        random_subset(&mut rng, n, size(j), &mut idx);
                        out.push(kernel_value(xs, &idx, w));
                    }
                }
                IndexStream::Quasi => {
                    let mut sobol = SobolStream::new(hi, 1 + start as u64)?;
                    let mut u = vec![0.0; hi];
                    for j in start..end {
                        sobol.next_into(&mut u)?;
                        subset_from_uniforms(n, u[..size(j)].iter().copied(), &mut idx);
                        out.push(kernel_value(xs, &idx, w));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut values = Vec::with_capacity(b);
    for p in parts {
        values.extend(p?);
    }
    Ok(values)
}

/// Sorted sequence of weighted k-wise means.
pub fn kernel_sequence(s: &SortedSample, spec: &KernelSpec) -> Result<KernelSequence> {
    spec.validate()?;
    let n = s.len();
    if spec.k > n as f64 {
        return Err(domain(format!("kernel order {} exceeds sample size {n}", spec.k)));
    }
    let integral = is_integral(spec.k);
    let k = spec.k.round() as usize;
    let count = if integral { binomial_capped(n, k, ENUMERATION_CAP) } else { None };
    let exact = match spec.mode {
        KernelMode::Exact => {
            if !integral {
                return Err(param(format!("exact enumeration needs integral k, got {}", spec.k)));
            }
            if count.is_none() {
                return Err(Error::Capacity(format!(
                    "C({n}, {k}) exceeds the enumeration cap of {ENUMERATION_CAP}; use bootstrap mode"
                )));
            }
            true
        }
        KernelMode::Bootstrap => false,
        KernelMode::Auto => count.is_some(),
    };
    let xs = s.values();
    let mut values = if exact {
        enumerate(xs, k, spec.weights.as_deref())
    } else {
        let b = spec.budget.unwrap_or_else(|| (100 * n).min(ENUMERATION_CAP as usize));
        bootstrap(xs, spec, b)?
    };
    values.par_sort_unstable_by(f64::total_cmp);
    Ok(KernelSequence {
        values,
        source_n: n,
        k_used: spec.k,
        exhaustive: exact,
    })
}

/// L-estimator `wa` applied to the kernel sequence. The inner trimming ε₀ is
/// derived from the overall breakdown point `t.epsilon`.
pub fn weighted_hl_mean(
    s: &SortedSample,
    spec: &KernelSpec,
    wa: LEstimator,
    t: &TrimSpec,
    conv: QuantileConvention,
) -> Result<f64> {
    Ok(weighted_hl_mean_with_sequence(s, spec, wa, t, conv)?.0)
}

/// As [`weighted_hl_mean`], also returning the kernel sequence that was used.
pub fn weighted_hl_mean_with_sequence(
    s: &SortedSample,
    spec: &KernelSpec,
    wa: LEstimator,
    t: &TrimSpec,
    conv: QuantileConvention,
) -> Result<(f64, KernelSequence)> {
    let inner = inner_trim(wa, t, spec.k)?;
    let seq = kernel_sequence(s, spec)?;
    if seq.len() == 1 {
        // k = n: a single kernel value, which every location estimator returns.
        return Ok((seq.values[0], seq));
    }
    let sorted = seq.clone().into_sorted()?;
    let v = match wa {
        LEstimator::Median => median(&sorted),
        _ => wa.profile(sorted.len(), &inner, conv)?.apply(sorted.values()),
    };
    Ok((v, seq))
}

/// Inner TrimSpec with ε₀ = 1 − (1 − ε)^k.
pub fn inner_trim(wa: LEstimator, t: &TrimSpec, k: f64) -> Result<TrimSpec> {
    let mut inner = t.clone();
    if wa.uses_epsilon() {
        inner.epsilon = inverse_breakdown_mapping(t.epsilon, k)?;
    }
    inner.validate()?;
    Ok(inner)
}

/// Median Hodges–Lehmann mean (mHLM_k).
pub fn median_hl_mean(s: &SortedSample, spec: &KernelSpec) -> Result<f64> {
    let seq = kernel_sequence(s, spec)?;
    Ok(median(&seq.into_sorted()?))
}

/// How γMoM assigns observations to blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    /// Consecutive blocks in input order.
    Identity,
    /// Consecutive blocks after a seeded shuffle.
    Shuffled(u64),
}

/// γ/(1+γ) quantile (midpoint convention) of b = ⌊n/k⌋ block means. The
/// trailing n mod k points after the partition step are dropped.
pub fn gamma_median_of_means(xs: &[f64], k: usize, gamma: f64, partition: Partition) -> Result<f64> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if k == 0 || k > n {
        return Err(domain(format!("block size k = {k} must lie in [1, n = {n}]")));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(param(format!("gamma = {gamma} must be finite and >= 0")));
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let owned;
    let data = match partition {
        Partition::Identity => xs,
        Partition::Shuffled(seed) => {
            let mut v = xs.to_vec();
            v.shuffle(&mut sample_rng(seed));
            owned = v;
            &owned
        }
    };
    let b = n / k;
    let means: Vec<f64> = data[..b * k]
        .par_chunks(k)
        .map(|c| c.iter().sum::<f64>() / k as f64)
        .collect();
    let sorted = SortedSample::from_unsorted(means)?;
    empirical_quantile(&sorted, gamma / (1.0 + gamma), QuantileConvention::Midpoint)
}

/// Median of `b` block means. Each block is an independent size-k draw
/// without replacement.
pub fn median_of_randomized_means(xs: &[f64], k: usize, b: usize, seed: u64) -> Result<f64> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if k == 0 || k > n {
        return Err(domain(format!("block size k = {k} must lie in [1, n = {n}]")));
    }
    if b == 0 {
        return Err(param("block count must be at least 1"));
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    const BLOCKS: usize = 4096;
    let means: Vec<f64> = (0..b.div_ceil(BLOCKS))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut idx = Vec::with_capacity(k);
            let count = BLOCKS.min(b - c * BLOCKS);
            (0..count)
                .map(|_| {
                    random_subset(&mut rng, n, k, &mut idx);
                    kernel_value(xs, &idx, None)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(median(&SortedSample::from_unsorted(means)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::mean;

    fn sample(v: &[f64]) -> SortedSample {
        SortedSample::from_unsorted(v.to_vec()).unwrap()
    }

    #[test]
    fn breakdown_examples() {
        assert!((breakdown_mapping(15.0 / 64.0, 2.0).unwrap() - 0.125).abs() < 1e-16);
        assert!((breakdown_mapping(0.5, 2.0).unwrap() - (1.0 - 0.5f64.sqrt())).abs() < 1e-16);
        assert_eq!(breakdown_mapping(0.3, 1.0).unwrap(), 0.3);
        assert!(breakdown_mapping(1.0, 2.0).is_err());
        for e0 in [0.0, 1e-6, 0.1, 0.5, 0.9] {
            for k in [1.0, 1.5, 2.0, 7.3] {
                let e = breakdown_mapping(e0, k).unwrap();
                assert!((inverse_breakdown_mapping(e, k).unwrap() - e0).abs() <= 2e-16);
            }
        }
    }

    #[test]
    fn plan_examples() {
        let p = |k, b| {
            let q = quasi_bootstrap_plan(k, b).unwrap();
            (q.draws_floor, q.draws_ceil)
        };
        assert_eq!(p(2.5, 1000), (500, 500));
        assert_eq!(p(2.40942, 10_000), (5906, 4094));
        // mHLM order with overall ε = 1/8 at ε₀ = 1/2: ln 2 / (3 ln 2 − ln 7) ≈ 5.19089
        let k = 2f64.ln() / (3.0 * 2f64.ln() - 7f64.ln());
        assert_eq!(p(k, 10_000), (8091, 1909));
        assert_eq!(p(3.0, 777), (777, 0));
        // exact ties go to even
        assert_eq!(p(1.5, 3), (2, 1));
        assert_eq!(p(1.5, 5), (2, 3));
    }

    #[test]
    fn enumeration_examples() {
        let s = sample(&[1.0, 2.0, 4.0]);
        let seq = kernel_sequence(&s, &KernelSpec::new(2.0).unwrap().with_mode(KernelMode::Exact)).unwrap();
        assert_eq!(seq.values, vec![1.5, 2.5, 3.0]);
        assert!(seq.exhaustive);
        let s = sample(&[3.0, 1.0, 7.0, 2.0, 5.0]);
        let one = kernel_sequence(&s, &KernelSpec::new(1.0).unwrap()).unwrap();
        assert_eq!(one.values, s.values());
        let all = kernel_sequence(&s, &KernelSpec::new(5.0).unwrap()).unwrap();
        assert_eq!(all.values, vec![mean(&s)]);
        let three = kernel_sequence(&s, &KernelSpec::new(3.0).unwrap()).unwrap();
        assert_eq!(three.len(), 10);
        assert_eq!(three.values[0], 2.0);
        assert_eq!(three.values[9], 5.0);
    }

    #[test]
    fn weighted_kernel_uses_rank_weights() {
        let s = sample(&[0.0, 10.0]);
        let spec = KernelSpec::new(2.0).unwrap().with_weights(vec![3.0, 1.0]).unwrap();
        assert_eq!(kernel_sequence(&s, &spec).unwrap().values, vec![2.5]);
    }

    #[test]
    fn exact_over_cap_is_capacity_error() {
        let s = SortedSample::new((0..5000).map(f64::from).collect()).unwrap();
        let spec = KernelSpec::new(2.0).unwrap().with_mode(KernelMode::Exact);
        assert!(kernel_sequence(&s, &spec).unwrap_err().is_capacity());
        let spec = KernelSpec::new(2.0).unwrap().with_budget(1000).unwrap();
        let seq = kernel_sequence(&s, &spec).unwrap();
        assert!(!seq.exhaustive);
        assert_eq!(seq.len(), 1000);
    }

    #[test]
    fn hl_examples() {
        let spec = KernelSpec::new(2.0).unwrap();
        assert_eq!(median_hl_mean(&sample(&[1.0, 2.0, 4.0]), &spec).unwrap(), 2.5);
        assert_eq!(median_hl_mean(&sample(&[1.0, 2.0, 3.0, 4.0]), &spec).unwrap(), 2.5);
        let t = TrimSpec::new(0.0, 1.0).unwrap();
        let v = weighted_hl_mean(&sample(&[1.0, 2.0, 4.0]), &spec, LEstimator::Median, &t, QuantileConvention::Ceiling);
        assert_eq!(v.unwrap(), 2.5);
    }

    #[test]
    fn k_equal_n_gives_mean() {
        let s = sample(&[1.0, 5.0, 2.0, 9.0]);
        let t = TrimSpec::new(0.1, 1.0).unwrap();
        let spec = KernelSpec::new(4.0).unwrap();
        let v = weighted_hl_mean(&s, &spec, LEstimator::Trimmed, &t, QuantileConvention::Ceiling).unwrap();
        assert_eq!(v, mean(&s));
    }

    #[test]
    fn bootstrap_is_deterministic_and_pool_independent() {
        let s = SortedSample::new((0..300).map(|i| (i as f64).sqrt()).collect()).unwrap();
        for stream in [IndexStream::Pseudo, IndexStream::Quasi] {
            let spec = KernelSpec::new(2.4)
                .unwrap()
                .with_mode(KernelMode::Bootstrap)
                .with_budget(200_000)
                .unwrap()
                .with_seed(9)
                .with_stream(stream);
            let a = kernel_sequence(&s, &spec).unwrap();
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let b = pool.install(|| kernel_sequence(&s, &spec).unwrap());
            assert_eq!(a, b);
            assert_eq!(a.len(), 200_000);
        }
    }

    #[test]
    fn subsets_are_distinct_and_sorted() {
        let mut rng = chunk_rng(1, 0);
        let mut idx = Vec::new();
        for m in [1, 2, 5, 40] {
            for _ in 0..200 {
                random_subset(&mut rng, 50, m, &mut idx);
                assert_eq!(idx.len(), m);
                assert!(idx.windows(2).all(|w| w[0] < w[1]));
                assert!(idx[m - 1] < 50);
            }
        }
        subset_from_uniforms(3, [0.999, 0.999, 0.0].into_iter(), &mut idx);
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn subset_mapping_is_uniform() {
        // Every 2-subset of 0..5 is hit equally often by a fine uniform grid.
        let mut counts = std::collections::HashMap::new();
        let mut idx = Vec::new();
        let g = 60;
        for i in 0..g {
            for j in 0..g {
                let u = [(i as f64 + 0.5) / g as f64, (j as f64 + 0.5) / g as f64];
                subset_from_uniforms(5, u.into_iter(), &mut idx);
                *counts.entry(idx.clone()).or_insert(0) += 1;
            }
        }
        assert_eq!(counts.len(), 10);
        // each ordered pair has probability 1/20; unordered 1/10
        assert!(counts.values().all(|&c| c == g * g / 10));
    }

    #[test]
    fn mom_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(gamma_median_of_means(&xs, 2, 1.0, Partition::Identity).unwrap(), 2.5);
        assert_eq!(gamma_median_of_means(&xs, 2, 1e-12, Partition::Identity).unwrap(), 1.5);
        assert_eq!(gamma_median_of_means(&xs, 2, 0.0, Partition::Identity).unwrap(), 1.5);
        assert!(gamma_median_of_means(&xs, 5, 1.0, Partition::Identity).is_err());
        // remainder dropped
        assert_eq!(gamma_median_of_means(&[1.0, 3.0, 5.0, 100.0, 7.0], 2, 1.0, Partition::Identity).unwrap(), 27.25);
        let a = gamma_median_of_means(&xs, 2, 1.0, Partition::Shuffled(4)).unwrap();
        assert_eq!(a, gamma_median_of_means(&xs, 2, 1.0, Partition::Shuffled(4)).unwrap());
    }

    #[test]
    fn morm_examples() {
        let xs = [4.0, 1.0, 9.0, 2.0, 6.0];
        let m = mean(&sample(&xs));
        assert!((median_of_randomized_means(&xs, 5, 7, 3).unwrap() - m).abs() < 1e-15);
        let a = median_of_randomized_means(&xs, 2, 101, 3).unwrap();
        assert_eq!(a, median_of_randomized_means(&xs, 2, 101, 3).unwrap());
        assert!(median_of_randomized_means(&xs, 6, 1, 0).is_err());
    }
}
